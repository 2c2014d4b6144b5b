//! Black-box perturbation search.
//!
//! Every attacker maximizes a single sign-unified gain, see [`degradation`],
//! so minimization and maximization problems share one code path. Each
//! attacker keeps the clean instance as a fallback, so its reported gain is
//! never negative. The one-shot random baseline is the exception: it reports
//! whatever its final state scores.
//!
//! `AttackResult::evaluations` counts solver calls made by the search itself;
//! the single clean solve is not included.

mod annealing;
mod baseline;
mod beam;
mod guided;
mod random_search;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::{ActionError, AttackAction};
use crate::instance::{Instance, ProblemKind};
use crate::solution::{Sense, Solution, SolveError};
use crate::solvers::Solver;

pub use annealing::{acceptance_probability, attack_sa};
pub use baseline::attack_random_baseline;
pub use beam::{attack_beam, Policy, PolicyError, RandomPolicy};
pub use guided::attack_og;
pub use random_search::attack_ra;

/// Sign-unified solver-quality loss: positive iff the attacked cost is worse.
pub fn degradation(sense: Sense, clean: f64, attacked: f64) -> f64 {
    match sense {
        Sense::Minimize => attacked - clean,
        Sense::Maximize => clean - attacked,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AttackMethod {
    /// K random edits, no search.
    Baseline,
    /// Best of N random K-step rollouts.
    RandomSearch,
    /// Beam of B states, M sampled actions each.
    OptimumGuided,
    /// Simulated annealing, repeated N times.
    Annealing,
    /// Policy-scored beam search.
    Beam,
}

impl AttackMethod {
    pub const ALL: [AttackMethod; 5] = [
        AttackMethod::Baseline,
        AttackMethod::RandomSearch,
        AttackMethod::OptimumGuided,
        AttackMethod::Annealing,
        AttackMethod::Beam,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AttackMethod::Baseline => "baseline",
            AttackMethod::RandomSearch => "ra",
            AttackMethod::OptimumGuided => "og",
            AttackMethod::Annealing => "sa",
            AttackMethod::Beam => "beam",
        }
    }

    /// How many independently seeded repeats an experiment reports.
    pub fn experiment_trials(self) -> usize {
        match self {
            AttackMethod::Baseline => 100,
            AttackMethod::RandomSearch | AttackMethod::OptimumGuided | AttackMethod::Annealing => 10,
            AttackMethod::Beam => 1,
        }
    }
}

impl fmt::Display for AttackMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttackMethod {
    type Err = AttackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or(AttackError::InvalidConfig("unknown attacker"))
    }
}

/// Simulated-annealing schedule. A move is accepted with probability
/// `min(1, exp((beta * delta + eps) / T))`; `T` starts at
/// `initial_temperature` and is multiplied by `decay` after every step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealingParams {
    pub initial_temperature: f64,
    pub decay: f64,
    pub beta: f64,
    pub eps: f64,
    /// Divide gain differences by the clean cost before applying `beta`, so
    /// one setting works across instance scales.
    pub relative_gain: bool,
}

impl Default for AnnealingParams {
    fn default() -> Self {
        AnnealingParams { initial_temperature: 1.0, decay: 0.9, beta: 20.0, eps: 0.0, relative_gain: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttackConfig {
    /// Maximum number of edits (K).
    pub budget: usize,
    /// Independent rollouts / annealing restarts (N).
    pub trials: usize,
    /// Beam width (B).
    pub beam: usize,
    /// Actions sampled per state (M).
    pub samples: usize,
    pub annealing: AnnealingParams,
    pub seed: u64,
}

impl AttackConfig {
    /// Edit budget per problem kind.
    pub fn default_budget(kind: ProblemKind) -> usize {
        match kind {
            ProblemKind::Dag | ProblemKind::Atsp => 20,
            ProblemKind::MaxCover | ProblemKind::MaxCoverSeparate => 10,
        }
    }

    /// Settings that give the attackers comparable evaluation time on each
    /// problem kind.
    pub fn tuned(kind: ProblemKind, method: AttackMethod) -> Self {
        use AttackMethod::*;
        use ProblemKind::*;
        // (RA N, OG B, OG M, SA N, SA M, beam B)
        let (ra_n, og_b, og_m, sa_n, sa_m, rl_b) = match kind {
            Dag => (30, 3, 9, 5, 6, 3),
            Atsp => (130, 5, 25, 13, 10, 5),
            MaxCover => (220, 6, 36, 22, 10, 6),
            MaxCoverSeparate => (250, 6, 36, 25, 10, 6),
        };
        let (trials, beam, samples) = match method {
            Baseline => (1, 1, 1),
            RandomSearch => (ra_n, 1, 1),
            OptimumGuided => (1, og_b, og_m),
            Annealing => (sa_n, 1, sa_m),
            Beam => (1, rl_b, 1),
        };
        AttackConfig {
            budget: Self::default_budget(kind),
            trials,
            beam,
            samples,
            annealing: AnnealingParams::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        if self.trials == 0 {
            return Err(AttackError::InvalidConfig("trials must be >= 1"));
        }
        if self.beam == 0 {
            return Err(AttackError::InvalidConfig("beam width must be >= 1"));
        }
        if self.samples == 0 {
            return Err(AttackError::InvalidConfig("samples must be >= 1"));
        }
        let a = &self.annealing;
        if !(a.decay > 0.0 && a.decay < 1.0) {
            return Err(AttackError::InvalidConfig("temperature decay must lie in (0, 1)"));
        }
        let positive = |x: f64| x > 0.0;
        if !positive(a.beta) || !positive(a.initial_temperature) || a.eps.is_nan() || a.eps < 0.0 {
            return Err(AttackError::InvalidConfig("beta and temperature must be > 0, eps >= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceStep {
    pub action: AttackAction,
    /// Solver cost on the state reached by this action.
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackResult {
    pub best_instance: Instance,
    pub best_cost: f64,
    pub clean_cost: f64,
    pub gain: f64,
    /// Path from the clean instance to `best_instance`.
    pub trace: Vec<TraceStep>,
    pub evaluations: usize,
    pub sense: Sense,
}

impl AttackResult {
    /// A successful attack strictly degrades the solver.
    pub fn success(&self) -> bool {
        self.gain > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AttackError {
    #[error(transparent)]
    Solver(#[from] SolveError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("invalid attack configuration: {0}")]
    InvalidConfig(&'static str),
}

/// Runs any attacker except [`AttackMethod::Beam`], which needs a policy.
pub fn run<S: Solver + ?Sized>(
    method: AttackMethod,
    solver: &S,
    instance: &Instance,
    cfg: &AttackConfig,
) -> Result<AttackResult, AttackError> {
    match method {
        AttackMethod::Baseline => attack_random_baseline(solver, instance, cfg),
        AttackMethod::RandomSearch => attack_ra(solver, instance, cfg),
        AttackMethod::OptimumGuided => attack_og(solver, instance, cfg),
        AttackMethod::Annealing => attack_sa(solver, instance, cfg),
        AttackMethod::Beam => attack_beam(&mut RandomPolicy::new(cfg.seed), solver, instance, cfg),
    }
}

/// Independent seed for stream `stream` of a run seeded with `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn rng_for(base: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream))
}

/// A visited state.
#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub instance: Instance,
    pub solution: Solution,
    pub path: Vec<TraceStep>,
}

impl Node {
    /// Order-insensitive identity of the edits applied so far.
    pub fn key(&self) -> Vec<AttackAction> {
        let mut k: Vec<AttackAction> = self.path.iter().map(|s| s.action).collect();
        k.sort_unstable();
        k
    }
}

/// Counts solver calls and tracks the best state found.
pub(crate) struct Search<'a, S: ?Sized> {
    solver: &'a S,
    pub sense: Sense,
    pub clean_cost: f64,
    pub calls: usize,
    best: Node,
    best_gain: f64,
}

impl<'a, S: Solver + ?Sized> Search<'a, S> {
    pub fn start(solver: &'a S, instance: &Instance) -> Result<(Self, Node), AttackError> {
        let solution = solver.solve(instance)?;
        let clean = Node { instance: instance.clone(), solution, path: Vec::new() };
        let search = Search {
            solver,
            sense: instance.sense(),
            clean_cost: clean.solution.cost,
            calls: 0,
            best: clean.clone(),
            best_gain: 0.0,
        };
        Ok((search, clean))
    }

    pub fn gain(&self, node: &Node) -> f64 {
        degradation(self.sense, self.clean_cost, node.solution.cost)
    }

    /// Applies `action` to `parent` and solves the result.
    pub fn expand(&mut self, parent: &Node, action: AttackAction) -> Result<Node, AttackError> {
        let instance = parent.instance.apply_action(&action)?;
        let solution = self.solver.solve(&instance)?;
        self.calls += 1;
        let mut path = parent.path.clone();
        path.push(TraceStep { action, cost: solution.cost });
        Ok(Node { instance, solution, path })
    }

    /// Records `node` if it strictly beats the best gain so far.
    pub fn offer(&mut self, node: &Node) {
        let g = self.gain(node);
        if g > self.best_gain {
            self.best_gain = g;
            self.best = node.clone();
        }
    }

    pub fn finish(self) -> AttackResult {
        self.finish_with(self.best.clone())
    }

    pub fn finish_with(&self, node: Node) -> AttackResult {
        AttackResult {
            gain: degradation(self.sense, self.clean_cost, node.solution.cost),
            best_cost: node.solution.cost,
            clean_cost: self.clean_cost,
            best_instance: node.instance,
            trace: node.path,
            evaluations: self.calls,
            sense: self.sense,
        }
    }
}

/// Keeps the `width` highest-gain distinct states; equal gains are ordered by
/// their sorted action lists.
pub(crate) fn select_top<S: Solver + ?Sized>(search: &Search<'_, S>, pool: Vec<Node>, width: usize) -> Vec<Node> {
    let mut scored: Vec<(f64, Vec<AttackAction>, Node)> =
        pool.into_iter().map(|n| (search.gain(&n), n.key(), n)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    scored.dedup_by(|later, earlier| later.1 == earlier.1);
    scored.into_iter().take(width).map(|(_, _, n)| n).collect()
}
