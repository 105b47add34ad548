//! Steepest-descent single-bit-flip local search.

use std::time::Instant;

use rand::Rng;

use super::{anneal::restart_rng, Adjacency, SolverResult};
use crate::error::{Error, Result};
use crate::qubo::{qubo_energy, QuboProblem};

/// From a seeded random start, repeatedly flip the bit with the most
/// negative energy delta until no flip lowers the energy. The result is
/// 1-flip locally optimal.
pub fn solve_greedy(problem: &QuboProblem, seed: u64) -> Result<SolverResult> {
    let n = problem.n();
    if n == 0 {
        return Err(Error::invalid("greedy solver needs at least one variable"));
    }
    let start = Instant::now();
    let adj = Adjacency::build(problem);
    let mut rng = restart_rng(seed, 0);
    let mut bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let mut fields = adj.fields(&bits);
    let mut evaluations = 0u64;

    loop {
        let mut best_u = 0;
        let mut best_delta = f64::INFINITY;
        for u in 0..n {
            evaluations += 1;
            let delta = adj.flip_delta(&bits, &fields, u);
            if delta < best_delta {
                best_delta = delta;
                best_u = u;
            }
        }
        if best_delta >= 0.0 {
            break;
        }
        adj.apply_flip(&mut bits, &mut fields, best_u);
    }

    let energy = qubo_energy(problem, &bits)?;
    Ok(SolverResult {
        bits,
        energy,
        evaluations,
        wall_time: start.elapsed(),
        solver_id: "greedy".to_string(),
        seed,
    })
}
