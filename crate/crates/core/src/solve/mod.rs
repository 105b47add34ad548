//! Classical QUBO solvers standing in for annealing hardware, plus a text
//! interchange format for dispatching problems to external solvers.

mod anneal;
mod exhaustive;
mod file;
mod greedy;

pub use anneal::{solve_anneal, solve_anneal_with_trace};
pub use exhaustive::{solve_exhaustive, solve_exhaustive_with_cap, DEFAULT_EXHAUSTIVE_CAP};
pub use file::{export_qubo, export_qubo_to_path, import_qubo, import_qubo_from_path};
pub use greedy::solve_greedy;

use std::time::Duration;

use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

/// Best assignment found by a solver run. `energy` always includes the
/// problem constant and is recomputed from the bits on return.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub bits: Vec<bool>,
    pub energy: f64,
    pub evaluations: u64,
    pub wall_time: Duration,
    pub solver_id: String,
    pub seed: u64,
}

/// Simulated-annealing run parameters: geometric temperature ladder from
/// `t_initial` down to `t_final` over `n_sweeps`, repeated for `restarts`
/// independent seeded starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub n_sweeps: usize,
    pub restarts: usize,
    pub t_initial: f64,
    pub t_final: f64,
    pub seed: u64,
}

pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_SWEEPS: usize = 2000;

impl AnnealSchedule {
    /// Default schedule for a problem: initial temperature set to the
    /// largest absolute diagonal so acceptance probabilities are invariant
    /// under rescaling of the objective.
    pub fn default_for(problem: &QuboProblem, seed: u64) -> Self {
        Self::scaled_to(problem, DEFAULT_RESTARTS, DEFAULT_SWEEPS, seed)
    }

    pub fn scaled_to(problem: &QuboProblem, restarts: usize, n_sweeps: usize, seed: u64) -> Self {
        let scale = problem.max_abs_diagonal();
        let t_initial = if scale > 0.0 { scale } else { 1.0 };
        Self {
            n_sweeps,
            restarts,
            t_initial,
            t_final: 1e-3 * t_initial,
            seed,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.n_sweeps == 0 || self.restarts == 0 {
            return Err(Error::invalid("schedule counts must be at least 1"));
        }
        if !(self.t_final > 0.0 && self.t_initial > self.t_final) {
            return Err(Error::invalid(format!(
                "temperatures must satisfy t_initial > t_final > 0 (got {} and {})",
                self.t_initial, self.t_final
            )));
        }
        Ok(())
    }

    /// Temperature for sweep `j` on the geometric ladder.
    pub(crate) fn temperature(&self, sweep: usize) -> f64 {
        if self.n_sweeps <= 1 {
            return self.t_initial;
        }
        let frac = sweep as f64 / (self.n_sweeps - 1) as f64;
        self.t_initial * (self.t_final / self.t_initial).powf(frac)
    }
}

/// Symmetric adjacency view of an upper-triangular problem with cached
/// per-variable local fields. A variable's flip delta is
/// `(1 - 2 q_u) * field_u`; flipping updates neighbor fields in O(degree).
pub(crate) struct Adjacency {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    coeffs: Vec<f64>,
    diag: Vec<f64>,
}

impl Adjacency {
    pub fn build(problem: &QuboProblem) -> Self {
        let n = problem.n();
        let mut diag = vec![0.0; n];
        let mut degree = vec![0usize; n];
        for &(u, v, val) in problem.coefficients() {
            if u == v {
                diag[u as usize] = val;
            } else {
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut neighbors = vec![0u32; offsets[n]];
        let mut coeffs = vec![0.0; offsets[n]];
        let mut cursor = offsets.clone();
        for &(u, v, val) in problem.coefficients() {
            if u == v {
                continue;
            }
            neighbors[cursor[u as usize]] = v;
            coeffs[cursor[u as usize]] = val;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            coeffs[cursor[v as usize]] = val;
            cursor[v as usize] += 1;
        }
        Self {
            offsets,
            neighbors,
            coeffs,
            diag,
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Local fields for an assignment: `field_u = Q_uu + sum_{v set} Q_uv`.
    pub fn fields(&self, bits: &[bool]) -> Vec<f64> {
        let mut fields = self.diag.clone();
        for (u, field) in fields.iter_mut().enumerate() {
            let (lo, hi) = (self.offsets[u], self.offsets[u + 1]);
            for (idx, &v) in self.neighbors[lo..hi].iter().enumerate() {
                if bits[v as usize] {
                    *field += self.coeffs[lo + idx];
                }
            }
        }
        fields
    }

    pub fn flip_delta(&self, bits: &[bool], fields: &[f64], u: usize) -> f64 {
        if bits[u] {
            -fields[u]
        } else {
            fields[u]
        }
    }

    /// Flip variable `u`, updating the assignment and neighbor fields.
    pub fn apply_flip(&self, bits: &mut [bool], fields: &mut [f64], u: usize) {
        let sign = if bits[u] { -1.0 } else { 1.0 };
        let (lo, hi) = (self.offsets[u], self.offsets[u + 1]);
        for (idx, &v) in self.neighbors[lo..hi].iter().enumerate() {
            fields[v as usize] += sign * self.coeffs[lo + idx];
        }
        bits[u] = !bits[u];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::qubo_energy;

    fn toy_problem() -> QuboProblem {
        QuboProblem::new(
            3,
            vec![(0, 0, -1.0), (1, 1, 2.0), (0, 1, 3.0), (1, 2, -0.5)],
            1.5,
            None,
        )
        .unwrap()
    }

    #[test]
    fn flip_deltas_agree_with_energy_differences() {
        let p = toy_problem();
        let adj = Adjacency::build(&p);
        for mask in 0u32..8 {
            let bits: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
            let fields = adj.fields(&bits);
            let base = qubo_energy(&p, &bits).unwrap();
            for u in 0..3 {
                let mut flipped = bits.clone();
                flipped[u] = !flipped[u];
                let expect = qubo_energy(&p, &flipped).unwrap() - base;
                let got = adj.flip_delta(&bits, &fields, u);
                assert!((got - expect).abs() < 1e-12, "mask {mask} u {u}");
            }
        }
    }

    #[test]
    fn apply_flip_keeps_fields_consistent() {
        let p = toy_problem();
        let adj = Adjacency::build(&p);
        let mut bits = vec![false, true, false];
        let mut fields = adj.fields(&bits);
        for &u in &[0usize, 2, 1, 1, 0] {
            adj.apply_flip(&mut bits, &mut fields, u);
            let fresh = adj.fields(&bits);
            for (a, b) in fields.iter().zip(&fresh) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn schedule_temperatures_are_geometric_and_ordered() {
        let s = AnnealSchedule {
            n_sweeps: 5,
            restarts: 1,
            t_initial: 8.0,
            t_final: 0.5,
            seed: 0,
        };
        s.validate().unwrap();
        assert_eq!(s.temperature(0), 8.0);
        assert!((s.temperature(4) - 0.5).abs() < 1e-12);
        for j in 1..5 {
            assert!(s.temperature(j) < s.temperature(j - 1));
        }
        let ratio = s.temperature(1) / s.temperature(0);
        for j in 1..4 {
            assert!((s.temperature(j + 1) / s.temperature(j) - ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_schedules_rejected() {
        let p = toy_problem();
        let mut s = AnnealSchedule::default_for(&p, 0);
        s.restarts = 0;
        assert!(s.validate().is_err());
        let mut s = AnnealSchedule::default_for(&p, 0);
        s.t_final = s.t_initial;
        assert!(s.validate().is_err());
    }
}
