//! Problem instances encoded as typed graphs.
//!
//! Node ids are dense integers `0..n`. Coverage instances place the set nodes
//! first (`0..set_count`) followed by the element nodes.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::solution::Sense;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("precedence graph contains a cycle")]
    Cycle,
    #[error("job {job}: duration must be finite and > 0")]
    InvalidDuration { job: usize },
    #[error("job {job}: resource must lie in (0, 1]")]
    InvalidResource { job: usize },
    #[error("node {node} out of range (node count {node_count})")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("duplicate edge ({src}, {dst})")]
    DuplicateEdge { src: usize, dst: usize },
    #[error("edge ({src}, {dst}): weight must be finite and > 0")]
    InvalidWeight { src: usize, dst: usize },
    #[error("distance matrix has {found} entries, expected {expected}")]
    MatrixSize { expected: usize, found: usize },
    #[error("element {element}: weight must be finite and >= 0")]
    InvalidElementWeight { element: usize },
    #[error("edge ({src}, {dst}) does not connect a set node to an element node")]
    NotBipartite { src: usize, dst: usize },
    #[error("element {element} is white but plain max-cover only has black elements")]
    WhiteElement { element: usize },
    #[error("set budget k={k} must satisfy 1 <= k <= {sets}")]
    SetBudget { k: usize, sets: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProblemKind {
    Dag,
    Atsp,
    MaxCover,
    MaxCoverSeparate,
}

impl ProblemKind {
    pub fn sense(self) -> Sense {
        match self {
            ProblemKind::Dag | ProblemKind::Atsp => Sense::Minimize,
            ProblemKind::MaxCover | ProblemKind::MaxCoverSeparate => Sense::Maximize,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Dag => "dag",
            ProblemKind::Atsp => "atsp",
            ProblemKind::MaxCover => "mc",
            ProblemKind::MaxCoverSeparate => "mcscc",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A schedulable job: run time and fraction of the single resource pool.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Job {
    pub duration: f64,
    pub resource: f64,
}

impl Job {
    pub fn new(duration: f64, resource: f64) -> Self {
        Job { duration, resource }
    }
}

/// Jobs with precedence edges `(parent, child)`; total capacity is 1.0.
#[derive(Clone, Debug, PartialEq)]
pub struct DagInstance {
    jobs: Vec<Job>,
    edges: BTreeSet<(usize, usize)>,
}

impl DagInstance {
    pub fn new(
        jobs: Vec<Job>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InstanceError> {
        let n = jobs.len();
        for (job, j) in jobs.iter().enumerate() {
            if !(j.duration.is_finite() && j.duration > 0.0) {
                return Err(InstanceError::InvalidDuration { job });
            }
            if !(j.resource.is_finite() && j.resource > 0.0 && j.resource <= 1.0) {
                return Err(InstanceError::InvalidResource { job });
            }
        }
        let mut set = BTreeSet::new();
        for (src, dst) in edges {
            for node in [src, dst] {
                if node >= n {
                    return Err(InstanceError::NodeOutOfRange { node, node_count: n });
                }
            }
            if src == dst {
                return Err(InstanceError::SelfLoop { node: src });
            }
            if !set.insert((src, dst)) {
                return Err(InstanceError::DuplicateEdge { src, dst });
            }
        }
        let dag = DagInstance { jobs, edges: set };
        if dag.topological_order().is_none() {
            return Err(InstanceError::Cycle);
        }
        Ok(dag)
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edges.contains(&(src, dst))
    }

    /// Children lists and parent counts.
    pub fn adjacency(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let mut children = vec![Vec::new(); self.jobs.len()];
        let mut parents = vec![0usize; self.jobs.len()];
        for &(u, v) in &self.edges {
            children[u].push(v);
            parents[v] += 1;
        }
        (children, parents)
    }

    /// Kahn's algorithm, smallest ready id first. `None` if cyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let (children, mut indeg) = self.adjacency();
        let mut ready: BTreeSet<usize> = (0..self.jobs.len()).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.jobs.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == self.jobs.len()).then_some(order)
    }

    pub(crate) fn remove_edge(&mut self, src: usize, dst: usize) -> bool {
        self.edges.remove(&(src, dst))
    }
}

/// Complete directed graph on `n` cities, row-major weights.
#[derive(Clone, Debug, PartialEq)]
pub struct AtspInstance {
    n: usize,
    weights: Vec<f64>,
}

impl AtspInstance {
    /// `weights` is the full `n x n` matrix; the diagonal is ignored and
    /// stored as zero.
    pub fn new(n: usize, mut weights: Vec<f64>) -> Result<Self, InstanceError> {
        if weights.len() != n * n {
            return Err(InstanceError::MatrixSize { expected: n * n, found: weights.len() });
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    weights[i * n + j] = 0.0;
                    continue;
                }
                let w = weights[i * n + j];
                if !(w.is_finite() && w > 0.0) {
                    return Err(InstanceError::InvalidWeight { src: i, dst: j });
                }
            }
        }
        Ok(AtspInstance { n, weights })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, InstanceError> {
        let n = rows.len();
        let mut weights = Vec::with_capacity(n * n);
        for row in rows {
            weights.extend_from_slice(row.as_ref());
        }
        Self::new(n, weights)
    }

    pub fn cities(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights[from * self.n + to]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn halve(&mut self, from: usize, to: usize) {
        self.weights[from * self.n + to] /= 2.0;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Black,
    White,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Element {
    pub weight: f64,
    pub color: Color,
}

impl Element {
    pub fn black(weight: f64) -> Self {
        Element { weight, color: Color::Black }
    }

    pub fn white() -> Self {
        Element { weight: 0.0, color: Color::White }
    }
}

/// What limits a feasible selection of sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoverageBudget {
    /// Plain maximum coverage: at most `k` sets.
    Sets(usize),
    /// Separate coverage constraint: at most `k` white elements covered.
    WhiteElements(usize),
}

/// Sets over weighted elements. `sets[j]` holds sorted element indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageInstance {
    elements: Vec<Element>,
    sets: Vec<Vec<usize>>,
    budget: CoverageBudget,
}

impl CoverageInstance {
    pub fn new(
        elements: Vec<Element>,
        sets: Vec<Vec<usize>>,
        budget: CoverageBudget,
    ) -> Result<Self, InstanceError> {
        let n_sets = sets.len();
        let node_count = n_sets + elements.len();
        for (i, e) in elements.iter().enumerate() {
            if !(e.weight.is_finite() && e.weight >= 0.0) {
                return Err(InstanceError::InvalidElementWeight { element: i });
            }
            if matches!(budget, CoverageBudget::Sets(_)) && e.color == Color::White {
                return Err(InstanceError::WhiteElement { element: i });
            }
        }
        if let CoverageBudget::Sets(k) = budget {
            if k == 0 || k > n_sets {
                return Err(InstanceError::SetBudget { k, sets: n_sets });
            }
        }
        let mut normalized = Vec::with_capacity(n_sets);
        for (j, mut members) in sets.into_iter().enumerate() {
            members.sort_unstable();
            for w in members.windows(2) {
                if w[0] == w[1] {
                    return Err(InstanceError::DuplicateEdge { src: j, dst: n_sets + w[0] });
                }
            }
            if let Some(&last) = members.last() {
                if last >= elements.len() {
                    return Err(InstanceError::NodeOutOfRange { node: n_sets + last, node_count });
                }
            }
            normalized.push(members);
        }
        Ok(CoverageInstance { elements, sets: normalized, budget })
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn members(&self, set: usize) -> &[usize] {
        &self.sets[set]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn budget(&self) -> CoverageBudget {
        self.budget
    }

    pub fn covers(&self, set: usize, element: usize) -> bool {
        self.sets[set].binary_search(&element).is_ok()
    }

    /// Node id of element `i`.
    pub fn element_node(&self, element: usize) -> usize {
        self.sets.len() + element
    }

    /// Element index of node id `node`, if it is an element node.
    pub fn node_element(&self, node: usize) -> Option<usize> {
        node.checked_sub(self.sets.len()).filter(|&e| e < self.elements.len())
    }

    pub(crate) fn insert_member(&mut self, set: usize, element: usize) -> bool {
        match self.sets[set].binary_search(&element) {
            Ok(_) => false,
            Err(pos) => {
                self.sets[set].insert(pos, element);
                true
            }
        }
    }
}

/// A validated problem instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Dag(DagInstance),
    Atsp(AtspInstance),
    Coverage(CoverageInstance),
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Instance::Dag(_) => ProblemKind::Dag,
            Instance::Atsp(_) => ProblemKind::Atsp,
            Instance::Coverage(c) => match c.budget {
                CoverageBudget::Sets(_) => ProblemKind::MaxCover,
                CoverageBudget::WhiteElements(_) => ProblemKind::MaxCoverSeparate,
            },
        }
    }

    pub fn sense(&self) -> Sense {
        self.kind().sense()
    }

    pub fn node_count(&self) -> usize {
        match self {
            Instance::Dag(d) => d.job_count(),
            Instance::Atsp(a) => a.cities(),
            Instance::Coverage(c) => c.set_count() + c.element_count(),
        }
    }

    /// All edges as `(src, dst, weight)`, sorted by `(src, dst)`.
    ///
    /// Precedence and membership edges carry weight 1.
    pub fn graph_edges(&self) -> Vec<(usize, usize, f64)> {
        match self {
            Instance::Dag(d) => d.edges.iter().map(|&(u, v)| (u, v, 1.0)).collect(),
            Instance::Atsp(a) => {
                let n = a.n;
                let mut out = Vec::with_capacity(n * n.saturating_sub(1));
                for i in 0..n {
                    for j in (0..n).filter(|&j| j != i) {
                        out.push((i, j, a.weight(i, j)));
                    }
                }
                out
            }
            Instance::Coverage(c) => {
                let mut out = Vec::new();
                for (j, members) in c.sets.iter().enumerate() {
                    out.extend(members.iter().map(|&e| (j, c.element_node(e), 1.0)));
                }
                out
            }
        }
    }

    pub fn as_dag(&self) -> Option<&DagInstance> {
        match self {
            Instance::Dag(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_atsp(&self) -> Option<&AtspInstance> {
        match self {
            Instance::Atsp(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_coverage(&self) -> Option<&CoverageInstance> {
        match self {
            Instance::Coverage(c) => Some(c),
            _ => None,
        }
    }
}

impl From<DagInstance> for Instance {
    fn from(d: DagInstance) -> Self {
        Instance::Dag(d)
    }
}

impl From<AtspInstance> for Instance {
    fn from(a: AtspInstance) -> Self {
        Instance::Atsp(a)
    }
}

impl From<CoverageInstance> for Instance {
    fn from(c: CoverageInstance) -> Self {
        Instance::Coverage(c)
    }
}
