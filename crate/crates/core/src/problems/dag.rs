//! Single-pool, non-preemptive list scheduling.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::check_permutation;
use crate::instance::DagInstance;
use crate::solution::SolveError;

/// Slack allowed when summing resource fractions and comparing times.
const EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub start: Vec<f64>,
    pub finish: Vec<f64>,
    pub makespan: f64,
}

impl Schedule {
    /// Builds a schedule from start times (no validation).
    pub fn from_starts(dag: &DagInstance, start: Vec<f64>) -> Schedule {
        let finish: Vec<f64> =
            start.iter().zip(dag.jobs()).map(|(s, j)| s + j.duration).collect();
        let makespan = finish.iter().copied().fold(0.0, f64::max);
        Schedule { start, finish, makespan }
    }

    /// Checks durations, precedence and the unit capacity at every instant.
    pub fn verify(&self, dag: &DagInstance) -> Result<(), SolveError> {
        let n = dag.job_count();
        if self.start.len() != n || self.finish.len() != n {
            return Err(SolveError::Infeasible(format!("schedule covers {} of {n} jobs", self.start.len())));
        }
        for (i, job) in dag.jobs().iter().enumerate() {
            let (s, f) = (self.start[i], self.finish[i]);
            if !(s.is_finite() && s >= 0.0) {
                return Err(SolveError::Infeasible(format!("job {i} has start time {s}")));
            }
            if (f - s - job.duration).abs() > EPS * (1.0 + f.abs()) {
                return Err(SolveError::Infeasible(format!("job {i} is preempted or stretched")));
            }
        }
        for &(u, v) in dag.edges() {
            if self.start[v] + EPS < self.finish[u] {
                return Err(SolveError::Infeasible(format!("job {v} starts before parent {u} ends")));
            }
        }
        // Load only increases at start instants.
        for &instant in &self.start {
            let load: f64 = (0..n)
                .filter(|&j| self.start[j] <= instant + EPS && self.finish[j] > instant + EPS)
                .map(|j| dag.jobs()[j].resource)
                .sum();
            if load > 1.0 + EPS {
                return Err(SolveError::Infeasible(format!("load {load} exceeds capacity at t={instant}")));
            }
        }
        Ok(())
    }
}

/// Event-driven list scheduling.
///
/// At time 0 and after every batch of completions, ready jobs (all parents
/// finished) are scanned in `priority` order and each one that fits the
/// remaining capacity is started. Completions at the same instant are
/// processed together in job-id order.
pub fn simulate(dag: &DagInstance, priority: &[usize]) -> Result<Schedule, SolveError> {
    let n = dag.job_count();
    check_permutation(priority, n)?;
    let jobs = dag.jobs();
    let (children, mut missing_parents) = dag.adjacency();
    let mut started = vec![false; n];
    let mut start = vec![0.0; n];
    let mut finish = vec![0.0; n];
    let mut running: Vec<usize> = Vec::new();
    let mut now = 0.0;

    loop {
        let mut used: f64 = running.iter().map(|&j| jobs[j].resource).sum();
        for &j in priority {
            if started[j] || missing_parents[j] > 0 {
                continue;
            }
            if used + jobs[j].resource <= 1.0 + EPS {
                started[j] = true;
                start[j] = now;
                finish[j] = now + jobs[j].duration;
                used += jobs[j].resource;
                running.push(j);
            }
        }
        let Some(next) = running.iter().map(|&j| finish[j]).reduce(f64::min) else {
            break;
        };
        now = next;
        let mut done: Vec<usize> = running.iter().copied().filter(|&j| finish[j] <= next).collect();
        done.sort_unstable();
        running.retain(|&j| finish[j] > next);
        for j in done {
            for &c in &children[j] {
                missing_parents[c] -= 1;
            }
        }
    }
    debug_assert!(started.iter().all(|&s| s));
    let makespan = finish.iter().copied().fold(0.0, f64::max);
    Ok(Schedule { start, finish, makespan })
}

/// Makespan of the list schedule for `priority`.
pub fn cost(dag: &DagInstance, priority: &[usize]) -> Result<f64, SolveError> {
    simulate(dag, priority).map(|s| s.makespan)
}

/// Makespan of an explicit schedule, after checking it is feasible.
pub fn start_times_cost(dag: &DagInstance, start: &[f64]) -> Result<f64, SolveError> {
    let schedule = Schedule::from_starts(dag, start.to_vec());
    schedule.verify(dag)?;
    Ok(schedule.makespan)
}
