use rand::Rng;

use super::{rng_for, AttackConfig, AttackError, AttackResult, Search};
use crate::instance::Instance;
use crate::problems::ActionSpace;
use crate::solvers::Solver;

/// `trials` independent random rollouts of `budget` edits; every intermediate
/// state is a candidate for the best.
pub fn attack_ra<S: Solver + ?Sized>(
    solver: &S,
    instance: &Instance,
    cfg: &AttackConfig,
) -> Result<AttackResult, AttackError> {
    cfg.validate()?;
    let (mut search, clean) = Search::start(solver, instance)?;
    for t in 0..cfg.trials {
        let mut rng = rng_for(cfg.seed, t as u64);
        let mut node = clean.clone();
        for _ in 0..cfg.budget {
            let space = ActionSpace::new(&node.instance, &node.solution);
            if space.is_empty() {
                break;
            }
            let action = space.get(rng.random_range(0..space.len()));
            node = search.expand(&node, action)?;
            search.offer(&node);
        }
    }
    Ok(search.finish())
}
