use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;

use super::{rng_for, select_top, AttackConfig, AttackError, AttackResult, Search};
use crate::instance::Instance;
use crate::problems::ActionSpace;
use crate::solvers::Solver;

/// Beam search over sampled edits. The beam starts as `beam` copies of the
/// clean instance; each state draws `samples` distinct candidate edits, and
/// the best `beam` distinct children survive.
pub fn attack_og<S: Solver + ?Sized>(
    solver: &S,
    instance: &Instance,
    cfg: &AttackConfig,
) -> Result<AttackResult, AttackError> {
    cfg.validate()?;
    let (mut search, clean) = Search::start(solver, instance)?;
    let mut rng = rng_for(cfg.seed, 0);
    let mut beam = vec![clean; cfg.beam];
    for _ in 0..cfg.budget {
        let mut pool = Vec::new();
        for node in &beam {
            let space = ActionSpace::new(&node.instance, &node.solution);
            let m = cfg.samples.min(space.len());
            for i in index::sample(&mut rng, space.len(), m) {
                let child = search.expand(node, space.get(i))?;
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
