use alloc::string::String;
use alloc::vec::Vec;

use crate::instance::{Instance, ProblemKind};
use crate::problems;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// Cost assigned to infeasible or missing solver output.
    pub fn worst(self) -> f64 {
        match self {
            Sense::Minimize => f64::INFINITY,
            Sense::Maximize => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        }
    }
}

/// What a solver returns.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    /// Job priority order fed to the list scheduler.
    Priority(Vec<usize>),
    /// Explicit job start times (used by the exact scheduler, which may idle).
    StartTimes(Vec<f64>),
    /// City visiting order; the tour closes back to its first city.
    Tour(Vec<usize>),
    /// Chosen set ids.
    Selection(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Solved,
    /// The solver returned something that violates the instance constraints.
    Infeasible,
    /// The solver hit its time limit without a usable answer.
    Timeout,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub payload: Payload,
    pub cost: f64,
    pub sense: Sense,
    pub outcome: Outcome,
}

impl Solution {
    /// Scores `payload` on `instance`. Never trusts an externally reported cost.
    pub fn evaluate(instance: &Instance, payload: Payload) -> Result<Solution, SolveError> {
        let cost = problems::evaluate(instance, &payload)?;
        Ok(Solution { payload, cost, sense: instance.sense(), outcome: Outcome::Solved })
    }

    /// Like [`Solution::evaluate`], but infeasible payloads become a flagged
    /// worst-case solution instead of an error.
    pub fn evaluate_or_flag(instance: &Instance, payload: Payload) -> Result<Solution, SolveError> {
        match problems::evaluate(instance, &payload) {
            Ok(cost) => Ok(Solution { payload, cost, sense: instance.sense(), outcome: Outcome::Solved }),
            Err(SolveError::Infeasible(_)) => Ok(Solution::flagged(instance, Outcome::Infeasible, payload)),
            Err(e) => Err(e),
        }
    }

    pub fn flagged(instance: &Instance, outcome: Outcome, payload: Payload) -> Solution {
        let sense = instance.sense();
        Solution { payload, cost: sense.worst(), sense, outcome }
    }

    pub fn is_flagged(&self) -> bool {
        self.outcome != Outcome::Solved
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("solver {solver} does not handle {kind} instances")]
    Unsupported { solver: String, kind: ProblemKind },
    #[error("payload does not match the instance kind")]
    PayloadMismatch,
    #[error("payload is not a permutation of 0..{expected}")]
    NotPermutation { expected: usize },
    #[error("infeasible solution: {0}")]
    Infeasible(String),
    #[error("instance too large for exhaustive search ({size} > {limit})")]
    TooLarge { size: usize, limit: usize },
    #[error("external solver failed: {0}")]
    External(String),
    #[error("malformed solver output: {0}")]
    Malformed(String),
}
