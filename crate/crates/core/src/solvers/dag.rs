//! Priority rules for the list scheduler.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::DagInstance;

/// Ascending duration.
pub fn shortest_job_first(dag: &DagInstance) -> Vec<usize> {
    let jobs = dag.jobs();
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by(|&a, &b| jobs[a].duration.total_cmp(&jobs[b].duration).then(a.cmp(&b)));
    order
}

/// `cp(v) = duration(v) + max cp(child)`, computed in reverse topological order.
pub fn critical_path_lengths(dag: &DagInstance) -> Vec<f64> {
    let (children, _) = dag.adjacency();
    let order = dag.topological_order().expect("validated DAG is acyclic");
    let mut cp = vec![0.0; dag.job_count()];
    for &v in order.iter().rev() {
        let tail = children[v].iter().map(|&c| cp[c]).fold(0.0, f64::max);
        cp[v] = dag.jobs()[v].duration + tail;
    }
    cp
}

/// Descending critical-path length.
pub fn critical_path(dag: &DagInstance) -> Vec<usize> {
    let cp = critical_path_lengths(dag);
    let mut order: Vec<usize> = (0..cp.len()).collect();
    order.sort_by(|&a, &b| cp[b].total_cmp(&cp[a]).then(a.cmp(&b)));
    order
}

/// Descending block area `duration * resource`.
pub fn tetris(dag: &DagInstance) -> Vec<usize> {
    let area: Vec<f64> = dag.jobs().iter().map(|j| j.duration * j.resource).collect();
    let mut order: Vec<usize> = (0..area.len()).collect();
    order.sort_by(|&a, &b| area[b].total_cmp(&area[a]).then(a.cmp(&b)));
    order
}
