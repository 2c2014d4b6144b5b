//! The black-box solver interface and the builtin heuristics.

pub mod atsp;
pub mod coverage;
pub mod dag;
pub mod lp;

use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;

use crate::instance::{Instance, ProblemKind};
use crate::problems::brute_force_optimum;
use crate::solution::{Payload, Solution, SolveError};

/// A solver maps an instance to a solution. Attackers only see this trait.
pub trait Solver {
    fn name(&self) -> &str;

    /// Must return a solution whose cost is the instance's own re-evaluation
    /// of the payload. Infeasible or timed-out answers come back flagged, not
    /// as errors.
    fn solve(&self, instance: &Instance) -> Result<Solution, SolveError>;
}

impl<S: Solver + ?Sized> Solver for &S {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn solve(&self, instance: &Instance) -> Result<Solution, SolveError> {
        (**self).solve(instance)
    }
}

/// Builtin solvers. All are deterministic; ties go to the lower id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Heuristic {
    ShortestJobFirst,
    CriticalPath,
    Tetris,
    NearestNeighbour,
    FurthestInsertion,
    GreedyCover,
    LocalCover,
    GreedyAverage,
    /// Exhaustive search, small instances only.
    Exact,
}

impl Heuristic {
    pub const ALL: [Heuristic; 9] = [
        Heuristic::ShortestJobFirst,
        Heuristic::CriticalPath,
        Heuristic::Tetris,
        Heuristic::NearestNeighbour,
        Heuristic::FurthestInsertion,
        Heuristic::GreedyCover,
        Heuristic::LocalCover,
        Heuristic::GreedyAverage,
        Heuristic::Exact,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Heuristic::ShortestJobFirst => "dag-sjf",
            Heuristic::CriticalPath => "dag-critical-path",
            Heuristic::Tetris => "dag-tetris",
            Heuristic::NearestNeighbour => "atsp-nearest-neighbour",
            Heuristic::FurthestInsertion => "atsp-furthest-insertion",
            Heuristic::GreedyCover => "mc-greedy",
            Heuristic::LocalCover => "mcscc-local",
            Heuristic::GreedyAverage => "mcscc-greedy-average",
            Heuristic::Exact => "exact",
        }
    }

    pub fn supports(self, kind: ProblemKind) -> bool {
        use Heuristic::*;
        match self {
            ShortestJobFirst | CriticalPath | Tetris => kind == ProblemKind::Dag,
            NearestNeighbour | FurthestInsertion => kind == ProblemKind::Atsp,
            GreedyCover => kind == ProblemKind::MaxCover,
            LocalCover | GreedyAverage => kind == ProblemKind::MaxCoverSeparate,
            Exact => true,
        }
    }

    /// Builtin heuristics applicable to `kind`, excluding the exact solver.
    pub fn for_kind(kind: ProblemKind) -> impl Iterator<Item = Heuristic> {
        Self::ALL.into_iter().filter(move |h| *h != Heuristic::Exact && h.supports(kind))
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Heuristic {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|h| h.as_str() == s)
            .ok_or_else(|| SolveError::External(alloc::format!("unknown solver {s:?}")))
    }
}

impl Solver for Heuristic {
    fn name(&self) -> &str {
        self.as_str()
    }

    fn solve(&self, instance: &Instance) -> Result<Solution, SolveError> {
        if !self.supports(instance.kind()) {
            return Err(SolveError::Unsupported { solver: self.as_str().to_string(), kind: instance.kind() });
        }
        let payload = match (self, instance) {
            (Heuristic::Exact, _) => return brute_force_optimum(instance),
            (Heuristic::ShortestJobFirst, Instance::Dag(d)) => Payload::Priority(dag::shortest_job_first(d)),
            (Heuristic::CriticalPath, Instance::Dag(d)) => Payload::Priority(dag::critical_path(d)),
            (Heuristic::Tetris, Instance::Dag(d)) => Payload::Priority(dag::tetris(d)),
            (Heuristic::NearestNeighbour, Instance::Atsp(a)) => Payload::Tour(atsp::nearest_neighbour(a)),
            (Heuristic::FurthestInsertion, Instance::Atsp(a)) => Payload::Tour(atsp::furthest_insertion(a)),
            (Heuristic::GreedyCover, Instance::Coverage(c)) => Payload::Selection(coverage::greedy(c)),
            (Heuristic::LocalCover, Instance::Coverage(c)) => Payload::Selection(coverage::local(c)),
            (Heuristic::GreedyAverage, Instance::Coverage(c)) => {
                Payload::Selection(coverage::greedy_average(c))
            }
            _ => unreachable!("checked by supports()"),
        };
        Solution::evaluate(instance, payload)
    }
}
