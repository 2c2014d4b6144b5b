//! Cost evaluation, feasibility, candidate actions and exact oracles.

pub mod atsp;
pub mod candidates;
pub mod coverage;
pub mod dag;
pub mod exact;

use alloc::vec;

use crate::instance::Instance;
use crate::solution::{Payload, SolveError};

pub use candidates::ActionSpace;
pub use dag::Schedule;
pub use exact::brute_force_optimum;

/// `c(x, Q)` for any payload/instance pair.
pub fn evaluate(instance: &Instance, payload: &Payload) -> Result<f64, SolveError> {
    match (instance, payload) {
        (Instance::Dag(d), Payload::Priority(p)) => dag::cost(d, p),
        (Instance::Dag(d), Payload::StartTimes(s)) => dag::start_times_cost(d, s),
        (Instance::Atsp(a), Payload::Tour(t)) => atsp::tour_cost(a, t),
        (Instance::Coverage(c), Payload::Selection(s)) => coverage::cost(c, s),
        _ => Err(SolveError::PayloadMismatch),
    }
}

pub(crate) fn check_permutation(items: &[usize], n: usize) -> Result<(), SolveError> {
    if items.len() != n {
        return Err(SolveError::NotPermutation { expected: n });
    }
    let mut seen = vec![false; n];
    for &i in items {
        if i >= n || seen[i] {
            return Err(SolveError::NotPermutation { expected: n });
        }
        seen[i] = true;
    }
    Ok(())
}
