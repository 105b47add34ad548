//! Exact enumeration in Gray-code order with incremental energy updates.

use std::time::Instant;

use super::{Adjacency, SolverResult};
use crate::error::{Error, Result};
use crate::qubo::{qubo_energy, QuboProblem};

/// Hard cap on exhaustive problem size (2^24 states).
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 24;

pub fn solve_exhaustive(problem: &QuboProblem) -> Result<SolverResult> {
    solve_exhaustive_with_cap(problem, DEFAULT_EXHAUSTIVE_CAP)
}

/// Enumerate all `2^n` assignments. Between consecutive Gray codes exactly
/// one bit flips, so each step costs O(degree). Ties are broken toward the
/// assignment whose bit vector is smallest as a big-endian integer
/// (bit 0 most significant).
pub fn solve_exhaustive_with_cap(problem: &QuboProblem, cap: usize) -> Result<SolverResult> {
    let n = problem.n();
    if n > cap {
        return Err(Error::Capacity(format!(
            "exhaustive solver limited to {cap} variables, problem has {n}"
        )));
    }
    let start = Instant::now();
    let adj = Adjacency::build(problem);
    let mut bits = vec![false; n];
    let mut fields = adj.fields(&bits);
    let mut energy = problem.constant();
    let mut best_bits = bits.clone();
    let mut best_energy = energy;

    let total: u64 = 1u64 << n;
    for i in 1..total {
        let u = i.trailing_zeros() as usize; // Gray-code bit flipped at step i
        energy += adj.flip_delta(&bits, &fields, u);
        adj.apply_flip(&mut bits, &mut fields, u);
        if energy < best_energy || (energy == best_energy && bits < best_bits) {
            best_energy = energy;
            best_bits.copy_from_slice(&bits);
        }
    }

    let energy = qubo_energy(problem, &best_bits)?;
    Ok(SolverResult {
        bits: best_bits,
        energy,
        evaluations: total,
        wall_time: start.elapsed(),
        solver_id: "exhaustive".to_string(),
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(n: usize, coeffs: Vec<(u32, u32, f64)>, c: f64) -> QuboProblem {
        QuboProblem::new(n, coeffs, c, None).unwrap()
    }

    #[test]
    fn single_negative_diagonal_sets_the_bit() {
        let p = problem(1, vec![(0, 0, -1.0)], 0.0);
        let r = solve_exhaustive(&p).unwrap();
        assert_eq!(r.bits, vec![true]);
        assert_eq!(r.energy, -1.0);
        assert_eq!(r.evaluations, 2);
    }

    #[test]
    fn single_positive_diagonal_clears_the_bit() {
        let p = problem(1, vec![(0, 0, 1.0)], 0.0);
        let r = solve_exhaustive(&p).unwrap();
        assert_eq!(r.bits, vec![false]);
        assert_eq!(r.energy, 0.0);
    }

    #[test]
    fn tie_breaks_to_smallest_big_endian_vector() {
        // states: [0,0] -> 0, [1,0] -> -1, [0,1] -> -1, [1,1] -> 1
        let p = problem(2, vec![(0, 0, -1.0), (1, 1, -1.0), (0, 1, 3.0)], 0.0);
        let r = solve_exhaustive(&p).unwrap();
        assert_eq!(r.energy, -1.0);
        assert_eq!(r.bits, vec![false, true]);
    }

    #[test]
    fn empty_problem_is_the_constant() {
        let p = problem(0, vec![], 2.25);
        let r = solve_exhaustive(&p).unwrap();
        assert!(r.bits.is_empty());
        assert_eq!(r.energy, 2.25);
    }

    #[test]
    fn cap_is_enforced_by_name() {
        let p = problem(5, vec![], 0.0);
        let err = solve_exhaustive_with_cap(&p, 4).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('4') && msg.contains('5'), "{msg}");
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..20 {
            let n = rng.random_range(1..=8);
            let mut coeffs = Vec::new();
            for u in 0..n as u32 {
                for v in u..n as u32 {
                    if rng.random_bool(0.6) {
                        coeffs.push((u, v, rng.random_range(-1.0..1.0)));
                    }
                }
            }
            let c = rng.random_range(-1.0..1.0);
            let p = problem(n, coeffs, c);
            let r = solve_exhaustive(&p).unwrap();
            // brute force over full assignments, straight order
            let mut best = f64::INFINITY;
            for mask in 0u32..1 << n {
                let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                best = best.min(qubo_energy(&p, &bits).unwrap());
            }
            assert!((r.energy - best).abs() < 1e-12);
        }
    }
}
