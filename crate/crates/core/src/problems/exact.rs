//! Exhaustive optimum for small instances.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{AtspInstance, CoverageInstance, DagInstance, Instance};
use crate::problems::{atsp, coverage};
use crate::solution::{Payload, Solution, SolveError};

pub const MAX_DAG_JOBS: usize = 9;
pub const MAX_ATSP_CITIES: usize = 9;
pub const MAX_COVERAGE_SETS: usize = 12;

/// The true optimum `x*` of a small instance.
///
/// For DAG scheduling this is the resource-constrained optimum (jobs may be
/// held back deliberately), not the best list schedule.
pub fn brute_force_optimum(instance: &Instance) -> Result<Solution, SolveError> {
    match instance {
        Instance::Dag(d) => {
            guard(d.job_count(), MAX_DAG_JOBS)?;
            let starts = optimal_schedule(d);
            Solution::evaluate(instance, Payload::StartTimes(starts))
        }
        Instance::Atsp(a) => {
            guard(a.cities(), MAX_ATSP_CITIES)?;
            Solution::evaluate(instance, Payload::Tour(optimal_tour(a)))
        }
        Instance::Coverage(c) => {
            guard(c.set_count(), MAX_COVERAGE_SETS)?;
            Solution::evaluate(instance, Payload::Selection(optimal_selection(c)))
        }
    }
}

fn guard(size: usize, limit: usize) -> Result<(), SolveError> {
    if size > limit {
        Err(SolveError::TooLarge { size, limit })
    } else {
        Ok(())
    }
}

/// Enumerates the `(n-1)!` tours starting at city 0; the lexicographically
/// first optimal tour wins.
fn optimal_tour(a: &AtspInstance) -> Vec<usize> {
    let n = a.cities();
    let mut tour: Vec<usize> = (0..n).collect();
    if n < 3 {
        return tour;
    }
    let mut best = tour.clone();
    let mut best_cost = atsp::tour_cost(a, &tour).unwrap_or(f64::INFINITY);
    while next_permutation(&mut tour[1..]) {
        let c = atsp::tour_cost(a, &tour).unwrap_or(f64::INFINITY);
        if c < best_cost {
            best_cost = c;
            best.copy_from_slice(&tour);
        }
    }
    best
}

fn next_permutation(xs: &mut [usize]) -> bool {
    let Some(i) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = xs.iter().rposition(|&x| x > xs[i]).expect("pivot has a successor");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

fn optimal_selection(c: &CoverageInstance) -> Vec<usize> {
    let s = c.set_count();
    let mut best = Vec::new();
    let mut best_cost = coverage::cost(c, &best).unwrap_or(f64::NEG_INFINITY);
    for mask in 1u32..(1u32 << s) {
        let sel: Vec<usize> = (0..s).filter(|&j| mask & (1 << j) != 0).collect();
        if let Ok(cost) = coverage::cost(c, &sel) {
            if cost > best_cost {
                best_cost = cost;
                best = sel;
            }
        }
    }
    best
}

const TIME_EPS: f64 = 1e-9;
const CAPACITY_EPS: f64 = 1e-9;

type StateKey = (u32, Vec<(u8, u64)>);

/// Exact resource-constrained scheduling by dynamic programming over
/// decision epochs.
///
/// Some optimal schedule starts every job at time 0 or at some job's finish
/// time, so branching on which subset of ready jobs to start at each epoch
/// (including starting none and waiting) is exhaustive.
struct Rcpsp<'a> {
    dag: &'a DagInstance,
    parent_mask: Vec<u32>,
    all: u32,
    memo: BTreeMap<StateKey, (f64, u32)>,
}

fn optimal_schedule(dag: &DagInstance) -> Vec<f64> {
    let n = dag.job_count();
    let mut parent_mask = vec![0u32; n];
    for &(u, v) in dag.edges() {
        parent_mask[v] |= 1 << u;
    }
    let mut search = Rcpsp { dag, parent_mask, all: ((1u64 << n) - 1) as u32, memo: BTreeMap::new() };
    search.best(0, &[]);

    // Replay the memoized decisions.
    let mut starts = vec![0.0; n];
    let mut finished = 0u32;
    let mut running: Vec<(usize, f64)> = Vec::new();
    let mut now = 0.0;
    while finished != search.all {
        let (_, chosen) = search.memo[&key(finished, &running)];
        for j in (0..n).filter(|&j| chosen & (1 << j) != 0) {
            starts[j] = now;
            running.push((j, dag.jobs()[j].duration));
        }
        running.sort_by_key(|&(j, _)| j);
        let (dt, next_finished, next_running) = advance(finished, &running);
        now += dt;
        finished = next_finished;
        running = next_running;
    }
    starts
}

fn key(finished: u32, running: &[(usize, f64)]) -> StateKey {
    (finished, running.iter().map(|&(j, r)| (j as u8, r.to_bits())).collect())
}

/// Moves time to the next completion. `running` must be sorted by job id.
fn advance(finished: u32, running: &[(usize, f64)]) -> (f64, u32, Vec<(usize, f64)>) {
    let dt = running.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
    let mut done = finished;
    let mut rest = Vec::with_capacity(running.len());
    for &(j, r) in running {
        let left = r - dt;
        if left <= TIME_EPS {
            done |= 1 << j;
        } else {
            rest.push((j, left));
        }
    }
    (dt, done, rest)
}

impl Rcpsp<'_> {
    /// Minimum remaining time from a state; `running` is sorted by job id.
    fn best(&mut self, finished: u32, running: &[(usize, f64)]) -> f64 {
        if finished == self.all {
            return 0.0;
        }
        let k = key(finished, running);
        if let Some(&(v, _)) = self.memo.get(&k) {
            return v;
        }
        let jobs = self.dag.jobs();
        let busy = running.iter().fold(0u32, |m, &(j, _)| m | (1 << j));
        let ready = (0..jobs.len() as u32)
            .filter(|&j| {
                let bit = 1 << j;
                finished & bit == 0 && busy & bit == 0 && self.parent_mask[j as usize] & !finished == 0
            })
            .fold(0u32, |m, j| m | (1 << j));
        let free = 1.0 - running.iter().map(|&(j, _)| jobs[j].resource).sum::<f64>();

        let mut best = (f64::INFINITY, 0u32);
        // All submasks of `ready`, including the empty one (wait).
        let mut sub = ready;
        loop {
            let load: f64 = (0..jobs.len()).filter(|&j| sub & (1 << j) != 0).map(|j| jobs[j].resource).sum();
            if load <= free + CAPACITY_EPS && !(sub == 0 && running.is_empty()) {
                let mut next: Vec<(usize, f64)> = running.to_vec();
                next.extend((0..jobs.len()).filter(|&j| sub & (1 << j) != 0).map(|j| (j, jobs[j].duration)));
                next.sort_by_key(|&(j, _)| j);
                let (dt, done, rest) = advance(finished, &next);
                let total = dt + self.best(done, &rest);
                if total < best.0 {
                    best = (total, sub);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & ready;
        }
        self.memo.insert(k, best);
        best.0
    }
}
