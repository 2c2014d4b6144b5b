use rand::seq::index;
use rand::Rng;

use super::{rng_for, AttackConfig, AttackError, AttackResult, Search};
use crate::instance::Instance;
use crate::problems::ActionSpace;
use crate::solvers::Solver;

/// `min(1, exp((beta * delta + eps) / temperature))`.
pub fn acceptance_probability(delta: f64, beta: f64, eps: f64, temperature: f64) -> f64 {
    let p = libm::exp((beta * delta + eps) / temperature);
    if p.is_nan() {
        0.0
    } else {
        p.min(1.0)
    }
}

/// Simulated annealing, restarted `trials` times from the clean instance.
///
/// Each step tries up to `samples` distinct edits in random order and moves to
/// the first one accepted. A restart ends after `budget` moves or when no
/// tried edit is accepted.
pub fn attack_sa<S: Solver + ?Sized>(
    solver: &S,
    instance: &Instance,
    cfg: &AttackConfig,
) -> Result<AttackResult, AttackError> {
    cfg.validate()?;
    let params = cfg.annealing;
    let (mut search, clean) = Search::start(solver, instance)?;
    let scale = if params.relative_gain && search.clean_cost.abs() > 0.0 { search.clean_cost.abs() } else { 1.0 };
    for t in 0..cfg.trials {
        let mut rng = rng_for(cfg.seed, t as u64);
        let mut node = clean.clone();
        let mut temperature = params.initial_temperature;
        for _ in 0..cfg.budget {
            let space = ActionSpace::new(&node.instance, &node.solution);
            let m = cfg.samples.min(space.len());
            let current = search.gain(&node);
            let mut moved = None;
            for i in index::sample(&mut rng, space.len(), m) {
                let child = search.expand(&node, space.get(i))?;
                search.offer(&child);
                let delta = (search.gain(&child) - current) / scale;
                let p = acceptance_probability(delta, params.beta, params.eps, temperature);
                if rng.random::<f64>() <= p {
                    moved = Some(child);
                    break;
                }
            }
            match moved {
                Some(child) => node = child,
                None => break,
            }
            temperature *= params.decay;
        }
    }
    Ok(search.finish())
}
