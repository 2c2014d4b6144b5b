#![no_std]
//! Robustness evaluation for combinatorial-optimization solvers.
//!
//! A problem instance is a typed graph (job DAG, complete ATSP digraph, or
//! set/element bipartite coverage graph). Attack actions modify one edge at a
//! time in a way that can never make the true optimum worse: removing a
//! precedence edge loosens a schedule, halving an ATSP edge lowers a cost,
//! adding a membership edge to a set enlarges what it can cover. A solver is
//! then treated as a black box and the attackers search for perturbations
//! that make its answer worse.
//!
//! This crate is `no_std` and only needs `alloc`. File formats, external
//! solver processes, dataset generation and the command line live in the
//! `corobust` crate.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod action;
pub mod attack;
pub mod instance;
pub mod problems;
pub mod solution;
pub mod solvers;

pub use action::{ActionError, ActionOp, AttackAction};
pub use instance::{
    Color, CoverageBudget, CoverageInstance, DagInstance, Element, AtspInstance, Instance,
    InstanceError, Job, ProblemKind,
};
pub use solution::{Outcome, Payload, Sense, Solution, SolveError};
pub use solvers::{Heuristic, Solver};

/// Absolute tolerance used for all cost comparisons.
pub const COST_TOLERANCE: f64 = 1e-9;
