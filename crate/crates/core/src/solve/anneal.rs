//! Simulated annealing with Metropolis single-bit flips.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Adjacency, AnnealSchedule, SolverResult};
use crate::error::{Error, Result};
use crate::qubo::{qubo_energy, QuboProblem};

pub fn solve_anneal(problem: &QuboProblem, schedule: &AnnealSchedule) -> Result<SolverResult> {
    Ok(solve_anneal_with_trace(problem, schedule)?.0)
}

/// Run the full schedule and also report the best-so-far energy after each
/// restart (non-increasing by construction).
pub fn solve_anneal_with_trace(
    problem: &QuboProblem,
    schedule: &AnnealSchedule,
) -> Result<(SolverResult, Vec<f64>)> {
    schedule.validate()?;
    let n = problem.n();
    if n == 0 {
        return Err(Error::invalid("annealer needs at least one variable"));
    }
    let start = Instant::now();
    let adj = Adjacency::build(problem);

    let mut best_bits: Vec<bool> = Vec::new();
    let mut best_energy = f64::INFINITY;
    let mut trace = Vec::with_capacity(schedule.restarts);
    let mut evaluations = 0u64;

    for restart in 0..schedule.restarts {
        // Each restart draws from its own stream of (seed, restart), so
        // restarts could run in any order with identical results.
        let mut rng = restart_rng(schedule.seed, restart as u64);
        let mut bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let mut fields = adj.fields(&bits);
        let mut energy = qubo_energy(problem, &bits)?;
        if energy < best_energy {
            best_energy = energy;
            best_bits = bits.clone();
        }

        for sweep in 0..schedule.n_sweeps {
            let temperature = schedule.temperature(sweep);
            for u in 0..n {
                evaluations += 1;
                let delta = adj.flip_delta(&bits, &fields, u);
                let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
                if accept {
                    energy += delta;
                    adj.apply_flip(&mut bits, &mut fields, u);
                    if energy < best_energy {
                        best_energy = energy;
                        best_bits.copy_from_slice(&bits);
                    }
                }
            }
        }
        trace.push(best_energy);
    }

    let energy = qubo_energy(problem, &best_bits)?;
    Ok((
        SolverResult {
            bits: best_bits,
            energy,
            evaluations,
            wall_time: start.elapsed(),
            solver_id: "anneal".to_string(),
            seed: schedule.seed,
        },
        trace,
    ))
}

/// SplitMix64-derived stream per (seed, restart) pair.
pub(crate) fn restart_rng(seed: u64, restart: u64) -> ChaCha8Rng {
    let mut z = seed.wrapping_add((restart + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}
