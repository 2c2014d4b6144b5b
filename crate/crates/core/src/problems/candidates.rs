//! The reduced action space at a given state.
//!
//! - DAG: every existing precedence edge may be removed.
//! - ATSP: every edge except those on the solver's current tour may be halved.
//! - MC: any missing (unchosen set, element) membership may be added.
//! - MCSCC: as MC, restricted to black elements.
//!
//! Candidates are indexed in lexicographic `(a1, a2)` order without being
//! materialized, so uniform sampling stays cheap on large coverage graphs.

use alloc::vec::Vec;

use crate::action::{ActionOp, AttackAction};
use crate::instance::{Color, CoverageInstance, Instance, ProblemKind};
use crate::solution::{Payload, Solution};

#[derive(Clone, Debug)]
pub struct ActionSpace<'a> {
    op: ActionOp,
    repr: Repr<'a>,
}

#[derive(Clone, Debug)]
enum Repr<'a> {
    Edges(Vec<(usize, usize)>),
    Atsp {
        n: usize,
        row: usize,
        succ: Option<Vec<usize>>,
    },
    Cover {
        inst: &'a CoverageInstance,
        /// Unchosen set ids, ascending.
        sets: Vec<usize>,
        /// `prefix[k]` = number of candidates in `sets[..k]`.
        prefix: Vec<usize>,
        black_only: bool,
        blacks: Vec<usize>,
    },
}

impl<'a> ActionSpace<'a> {
    pub fn new(instance: &'a Instance, last: &Solution) -> Self {
        let op = ActionOp::for_kind(instance.kind());
        let repr = match instance {
            Instance::Dag(d) => Repr::Edges(d.edges().iter().copied().collect()),
            Instance::Atsp(a) => {
                let n = a.cities();
                let succ = match &last.payload {
                    Payload::Tour(t) if is_permutation(t, n) => {
                        let mut succ = alloc::vec![0; n];
                        for (i, &c) in t.iter().enumerate() {
                            succ[c] = t[(i + 1) % n];
                        }
                        Some(succ)
                    }
                    _ => None,
                };
                let row = if n < 2 { 0 } else { n - 1 - usize::from(succ.is_some()) };
                Repr::Atsp { n, row, succ }
            }
            Instance::Coverage(c) => {
                let mut chosen = alloc::vec![false; c.set_count()];
                if let Payload::Selection(sel) = &last.payload {
                    for &s in sel.iter().filter(|&&s| s < c.set_count()) {
                        chosen[s] = true;
                    }
                }
                let black_only = instance.kind() == ProblemKind::MaxCoverSeparate;
                let blacks: Vec<usize> = if black_only {
                    (0..c.element_count()).filter(|&e| c.elements()[e].color == Color::Black).collect()
                } else {
                    Vec::new()
                };
                let sets: Vec<usize> = (0..c.set_count()).filter(|&s| !chosen[s]).collect();
                let mut prefix = Vec::with_capacity(sets.len() + 1);
                prefix.push(0);
                let mut total = 0;
                for &s in &sets {
                    let members = c.members(s);
                    total += if black_only {
                        blacks.len() - members.iter().filter(|&&e| c.elements()[e].color == Color::Black).count()
                    } else {
                        c.element_count() - members.len()
                    };
                    prefix.push(total);
                }
                Repr::Cover { inst: c, sets, prefix, black_only, blacks }
            }
        };
        ActionSpace { op, repr }
    }

    pub fn op(&self) -> ActionOp {
        self.op
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Edges(e) => e.len(),
            Repr::Atsp { n, row, .. } => n * row,
            Repr::Cover { prefix, .. } => *prefix.last().unwrap_or(&0),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `index`-th candidate in `(a1, a2)` order.
    ///
    /// # Panics
    /// If `index >= self.len()`.
    pub fn get(&self, index: usize) -> AttackAction {
        assert!(index < self.len(), "candidate index {index} out of range");
        let (a1, a2) = match &self.repr {
            Repr::Edges(e) => e[index],
            Repr::Atsp { row, succ, .. } => {
                let a = index / row;
                let mut b = index % row;
                let mut skip = [a, succ.as_ref().map_or(usize::MAX, |s| s[a])];
                skip.sort_unstable();
                for x in skip {
                    if b >= x {
                        b += 1;
                    }
                }
                (a, b)
            }
            Repr::Cover { inst, sets, prefix, black_only, blacks } => {
                let k = prefix.partition_point(|&p| p <= index) - 1;
                let set = sets[k];
                let rank = index - prefix[k];
                let members = inst.members(set);
                let element = if *black_only {
                    *blacks
                        .iter()
                        .filter(|e| members.binary_search(e).is_err())
                        .nth(rank)
                        .expect("rank within set count")
                } else {
                    let mut e = rank;
                    for &m in members {
                        if m <= e {
                            e += 1;
                        } else {
                            break;
                        }
                    }
                    e
                };
                (set, inst.element_node(element))
            }
        };
        AttackAction::new(self.op, a1, a2)
    }

    pub fn iter(&self) -> impl Iterator<Item = AttackAction> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<AttackAction> {
        self.iter().collect()
    }

    pub fn contains(&self, action: &AttackAction) -> bool {
        if action.op != self.op {
            return false;
        }
        let (a1, a2) = (action.a1, action.a2);
        match &self.repr {
            Repr::Edges(e) => e.binary_search(&(a1, a2)).is_ok(),
            Repr::Atsp { n, row, succ } => {
                *row > 0
                    && a1 < *n
                    && a2 < *n
                    && a1 != a2
                    && succ.as_ref().is_none_or(|s| s[a1] != a2)
            }
            Repr::Cover { inst, sets, black_only, .. } => {
                let Some(e) = inst.node_element(a2) else { return false };
                sets.binary_search(&a1).is_ok()
                    && !inst.covers(a1, e)
                    && (!black_only || inst.elements()[e].color == Color::Black)
            }
        }
    }
}

/// Candidate list for `instance` given the solver's last answer.
pub fn candidates(instance: &Instance, last: &Solution) -> Vec<AttackAction> {
    ActionSpace::new(instance, last).to_vec()
}

fn is_permutation(t: &[usize], n: usize) -> bool {
    super::check_permutation(t, n).is_ok()
}
