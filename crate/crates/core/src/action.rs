//! Single-edge attack actions.
//!
//! Every operation is chosen so the true optimum cannot get worse: removing a
//! precedence edge loosens constraints, halving an ATSP edge lowers a cost,
//! and adding a membership edge lets a set cover more.

use core::fmt;

use crate::instance::{Color, Instance, ProblemKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionOp {
    RemoveEdge,
    HalveEdge,
    AddEdge,
}

impl ActionOp {
    /// The only operation allowed on a given problem kind.
    pub fn for_kind(kind: ProblemKind) -> ActionOp {
        match kind {
            ProblemKind::Dag => ActionOp::RemoveEdge,
            ProblemKind::Atsp => ActionOp::HalveEdge,
            ProblemKind::MaxCover | ProblemKind::MaxCoverSeparate => ActionOp::AddEdge,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ActionOp::RemoveEdge => "remove_edge",
            ActionOp::HalveEdge => "halve_edge",
            ActionOp::AddEdge => "add_edge",
        }
    }
}

/// One edge modification on `(a1, a2)`.
///
/// Ordering is lexicographic by `(a1, a2)` first, which is the canonical
/// candidate order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AttackAction {
    pub op: ActionOp,
    pub a1: usize,
    pub a2: usize,
}

impl AttackAction {
    pub fn new(op: ActionOp, a1: usize, a2: usize) -> Self {
        AttackAction { op, a1, a2 }
    }
}

impl PartialOrd for AttackAction {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AttackAction {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.a1, self.a2, self.op).cmp(&(other.a1, other.a2, other.op))
    }
}

impl fmt::Display for AttackAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.op.as_str(), self.a1, self.a2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionError {
    #[error("{op:?} is not allowed on {kind} instances")]
    Incompatible { op: ActionOp, kind: ProblemKind },
    #[error("edge ({a1}, {a2}) does not exist")]
    MissingEdge { a1: usize, a2: usize },
    #[error("edge ({a1}, {a2}) already exists")]
    DuplicateEdge { a1: usize, a2: usize },
    #[error("edge ({a1}, {a2}) must join a set node to a black element node")]
    InvalidEndpoints { a1: usize, a2: usize },
}

impl Instance {
    /// Returns the perturbed instance; `self` is left untouched.
    pub fn apply_action(&self, action: &AttackAction) -> Result<Instance, ActionError> {
        let kind = self.kind();
        let AttackAction { op, a1, a2 } = *action;
        if op != ActionOp::for_kind(kind) {
            return Err(ActionError::Incompatible { op, kind });
        }
        match self {
            Instance::Dag(d) => {
                if !d.has_edge(a1, a2) {
                    return Err(ActionError::MissingEdge { a1, a2 });
                }
                let mut out = d.clone();
                out.remove_edge(a1, a2);
                Ok(Instance::Dag(out))
            }
            Instance::Atsp(a) => {
                if a1 == a2 || a1 >= a.cities() || a2 >= a.cities() {
                    return Err(ActionError::MissingEdge { a1, a2 });
                }
                let mut out = a.clone();
                out.halve(a1, a2);
                Ok(Instance::Atsp(out))
            }
            Instance::Coverage(c) => {
                let element = c.node_element(a2).filter(|_| a1 < c.set_count());
                let Some(element) = element else {
                    return Err(ActionError::InvalidEndpoints { a1, a2 });
                };
                if kind == ProblemKind::MaxCoverSeparate
                    && c.elements()[element].color != Color::Black
                {
                    return Err(ActionError::InvalidEndpoints { a1, a2 });
                }
                let mut out = c.clone();
                if !out.insert_member(a1, element) {
                    return Err(ActionError::DuplicateEdge { a1, a2 });
                }
                Ok(Instance::Coverage(out))
            }
        }
    }
}
