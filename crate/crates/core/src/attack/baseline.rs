use rand::Rng;

use super::{rng_for, AttackConfig, AttackError, AttackResult, Search};
use crate::instance::Instance;
use crate::problems::ActionSpace;
use crate::solvers::Solver;

/// Applies up to `budget` uniformly random edits and reports the final state,
/// which may be better for the solver than the clean instance.
pub fn attack_random_baseline<S: Solver + ?Sized>(
    solver: &S,
    instance: &Instance,
    cfg: &AttackConfig,
) -> Result<AttackResult, AttackError> {
    cfg.validate()?;
    let (mut search, mut node) = Search::start(solver, instance)?;
    let mut rng = rng_for(cfg.seed, 0);
    for _ in 0..cfg.budget {
        let space = ActionSpace::new(&node.instance, &node.solution);
        if space.is_empty() {
            break;
        }
        let action = space.get(rng.random_range(0..space.len()));
        node = search.expand(&node, action)?;
    }
    Ok(search.finish_with(node))
}
