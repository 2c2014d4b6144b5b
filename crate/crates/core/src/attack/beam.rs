use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{select_top, AttackConfig, AttackError, AttackResult, Search};
use crate::action::AttackAction;
use crate::instance::Instance;
use crate::problems::ActionSpace;
use crate::solvers::Solver;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("policy error: {0}")]
pub struct PolicyError(pub String);

/// Scores candidate edits of a state; higher is more promising.
/// The returned vector must be parallel to `candidates`.
pub trait Policy {
    fn score(&mut self, state: &Instance, candidates: &[AttackAction]) -> Result<Vec<f64>, PolicyError>;
}

impl<F> Policy for F
where
    F: FnMut(&Instance, &[AttackAction]) -> Result<Vec<f64>, PolicyError>,
{
    fn score(&mut self, state: &Instance, candidates: &[AttackAction]) -> Result<Vec<f64>, PolicyError> {
        self(state, candidates)
    }
}

/// Uniform random scores, for exercising the beam without a trained model.
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Policy for RandomPolicy {
    fn score(&mut self, _state: &Instance, candidates: &[AttackAction]) -> Result<Vec<f64>, PolicyError> {
        Ok(candidates.iter().map(|_| self.rng.random::<f64>()).collect())
    }
}

/// Policy-guided beam search. Each beam state expands its `beam` best-scored
/// edits (ties broken by candidate order); the `beam` best distinct children
/// by gain form the next beam.
pub fn attack_beam<P: Policy + ?Sized, S: Solver + ?Sized>(
    policy: &mut P,
    solver: &S,
    instance: &Instance,
    cfg: &AttackConfig,
) -> Result<AttackResult, AttackError> {
    cfg.validate()?;
    let (mut search, clean) = Search::start(solver, instance)?;
    let mut beam = alloc::vec![clean];
    for _ in 0..cfg.budget {
        let mut pool = Vec::new();
        for node in &beam {
            let candidates = ActionSpace::new(&node.instance, &node.solution).to_vec();
            if candidates.is_empty() {
                continue;
            }
            let scores = policy.score(&node.instance, &candidates)?;
            if scores.len() != candidates.len() {
                return Err(PolicyError(alloc::format!(
                    "expected {} scores, got {}",
                    candidates.len(),
                    scores.len()
                ))
                .into());
            }
            let mut order: Vec<usize> = (0..candidates.len()).collect();
            order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
            for &i in order.iter().take(cfg.beam) {
                let child = search.expand(node, candidates[i])?;
                search.offer(&child);
                pool.push(child);
            }
        }
        if pool.is_empty() {
            break;
        }
        beam = select_top(&search, pool, cfg.beam);
    }
    Ok(search.finish())
}
