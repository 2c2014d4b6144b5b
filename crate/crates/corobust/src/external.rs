//! Adapters for solvers that run as separate executables.
//!
//! Invocation: `EXE [--time-limit SECONDS] INPUT OUTPUT`, run in a fresh
//! temporary directory. The adapter writes `INPUT`, waits for the process and
//! reads `OUTPUT`. A process still running after the limit plus a grace
//! period is killed and the call returns a flagged timeout solution.
//!
//! ATSP input is the distance matrix: the city count on the first line, then
//! one row per line with space-separated weights. The output holds the tour
//! as whitespace-separated 0-based city ids.
//!
//! MILP input is the LP text from [`export_ilp`]. The output holds one
//! `NAME VALUE` pair per line, optionally preceded by `status WORD` with
//! `WORD` one of `optimal`, `feasible`, `timeout`, `infeasible`. Only the
//! `X_j` values are read; the selection is re-scored from scratch.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use corobust_core::solvers::lp::export_ilp;
use corobust_core::{Instance, Outcome, Payload, ProblemKind, Solution, SolveError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    AtspMatrix,
    Milp,
}

impl Protocol {
    pub fn supports(self, kind: ProblemKind) -> bool {
        match self {
            Protocol::AtspMatrix => kind == ProblemKind::Atsp,
            Protocol::Milp => matches!(kind, ProblemKind::MaxCover | ProblemKind::MaxCoverSeparate),
        }
    }
}

#[derive(Debug)]
pub struct ExternalSolver {
    pub exe: PathBuf,
    pub protocol: Protocol,
    /// Wall-clock limit handed to the executable.
    pub time_limit: Option<Duration>,
    /// Extra time before the process is killed.
    pub grace: Duration,
    /// One subprocess at a time per adapter; also stores the last wall time.
    state: Mutex<Option<Duration>>,
}

impl ExternalSolver {
    pub fn new(exe: impl Into<PathBuf>, protocol: Protocol, time_limit: Option<Duration>) -> Self {
        ExternalSolver {
            exe: exe.into(),
            protocol,
            time_limit,
            grace: Duration::from_millis(500),
            state: Mutex::new(None),
        }
    }

    /// Wall time of the most recent run.
    pub fn last_wall_time(&self) -> Option<Duration> {
        *self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn solve(&self, instance: &Instance) -> Result<Solution, SolveError> {
        if !self.protocol.supports(instance.kind()) {
            return Err(SolveError::Unsupported { solver: self.exe.display().to_string(), kind: instance.kind() });
        }
        let mut last = self.state.lock().unwrap_or_else(|e| e.into_inner());
        if self.time_limit == Some(Duration::ZERO) {
            *last = Some(Duration::ZERO);
            return Ok(Solution::flagged(instance, Outcome::Timeout, fallback_payload(instance)));
        }
        let dir = tempfile::tempdir().map_err(|e| SolveError::External(e.to_string()))?;
        let input = dir.path().join("input");
        let output = dir.path().join("output");
        fs::write(&input, self.input_text(instance)).map_err(|e| SolveError::External(e.to_string()))?;
        let start = Instant::now();
        let finished = self.run(dir.path(), &input, &output)?;
        *last = Some(start.elapsed());
        if !finished {
            return Ok(Solution::flagged(instance, Outcome::Timeout, fallback_payload(instance)));
        }
        let text = fs::read_to_string(&output)
            .map_err(|e| SolveError::Malformed(format!("cannot read solver output: {e}")))?;
        match self.protocol {
            Protocol::AtspMatrix => {
                let tour = parse_tour(&text)?;
                Solution::evaluate(instance, Payload::Tour(tour)).map_err(|e| match e {
                    SolveError::NotPermutation { .. } => SolveError::Malformed(e.to_string()),
                    other => other,
                })
            }
            Protocol::Milp => match parse_assignment(&text, instance)? {
                MilpAnswer::Selection(sel) => Solution::evaluate_or_flag(instance, Payload::Selection(sel)),
                MilpAnswer::NoIncumbent(outcome) => {
                    Ok(Solution::flagged(instance, outcome, fallback_payload(instance)))
                }
            },
        }
    }

    fn input_text(&self, instance: &Instance) -> String {
        match (self.protocol, instance) {
            (Protocol::AtspMatrix, Instance::Atsp(a)) => {
                let n = a.cities();
                let mut s = format!("{n}\n");
                for i in 0..n {
                    let row: Vec<String> = (0..n).map(|j| a.weight(i, j).to_string()).collect();
                    let _ = writeln!(s, "{}", row.join(" "));
                }
                s
            }
            (Protocol::Milp, Instance::Coverage(c)) => export_ilp(c),
            _ => unreachable!("protocol checked against kind"),
        }
    }

    /// `Ok(false)` when the process had to be killed.
    fn run(&self, dir: &Path, input: &Path, output: &Path) -> Result<bool, SolveError> {
        let mut cmd = Command::new(&self.exe);
        cmd.current_dir(dir).stdin(Stdio::null()).stdout(Stdio::null()).stderr(Stdio::piped());
        if let Some(limit) = self.time_limit {
            cmd.arg("--time-limit").arg(limit.as_secs_f64().to_string());
        }
        cmd.arg(input).arg(output);
        let mut child =
            cmd.spawn().map_err(|e| SolveError::External(format!("cannot launch {}: {e}", self.exe.display())))?;
        let deadline = self.time_limit.map(|l| Instant::now() + l + self.grace);
        loop {
            if let Some(status) = child.try_wait().map_err(|e| SolveError::External(e.to_string()))? {
                if status.success() {
                    return Ok(true);
                }
                let mut err = String::new();
                if let Some(mut pipe) = child.stderr.take() {
                    let _ = std::io::Read::read_to_string(&mut pipe, &mut err);
                }
                return Err(SolveError::External(format!("{} exited with {status}: {}", self.exe.display(), err.trim())));
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                let _ = child.kill();
                let _ = child.wait();
                return Ok(false);
            }
            std::thread::sleep(Duration::from_millis(2));
        }
    }
}

fn fallback_payload(instance: &Instance) -> Payload {
    match instance {
        Instance::Atsp(a) => Payload::Tour((0..a.cities()).collect()),
        Instance::Dag(d) => Payload::Priority((0..d.job_count()).collect()),
        Instance::Coverage(_) => Payload::Selection(Vec::new()),
    }
}

pub fn parse_tour(text: &str) -> Result<Vec<usize>, SolveError> {
    text.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| SolveError::Malformed(format!("bad city id {t:?}"))))
        .collect()
}

enum MilpAnswer {
    Selection(Vec<usize>),
    NoIncumbent(Outcome),
}

fn parse_assignment(text: &str, instance: &Instance) -> Result<MilpAnswer, SolveError> {
    let sets = instance.as_coverage().map_or(0, |c| c.set_count());
    let mut status = None;
    let mut chosen = vec![false; sets];
    let mut assigned = false;
    for (l, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            if line.trim().is_empty() {
                continue;
            }
            return Err(SolveError::Malformed(format!("line {}: expected `NAME VALUE`", l + 1)));
        };
        if name == "status" {
            status = Some(match value {
                "optimal" | "feasible" => Outcome::Solved,
                "timeout" => Outcome::Timeout,
                "infeasible" => Outcome::Infeasible,
                _ => return Err(SolveError::Malformed(format!("line {}: unknown status {value:?}", l + 1))),
            });
            continue;
        }
        let v: f64 = value
            .parse()
            .map_err(|_| SolveError::Malformed(format!("line {}: bad value {value:?}", l + 1)))?;
        if let Some(j) = name.strip_prefix("X_") {
            let j: usize = j.parse().map_err(|_| SolveError::Malformed(format!("line {}: bad variable {name}", l + 1)))?;
            if j >= sets {
                return Err(SolveError::Malformed(format!("line {}: no set {j}", l + 1)));
            }
            chosen[j] = v >= 0.5;
            assigned = true;
        } else if !name.starts_with("Y_") {
            return Err(SolveError::Malformed(format!("line {}: unknown variable {name}", l + 1)));
        }
    }
    match status {
        Some(outcome @ (Outcome::Timeout | Outcome::Infeasible)) if !assigned => Ok(MilpAnswer::NoIncumbent(outcome)),
        _ => Ok(MilpAnswer::Selection((0..sets).filter(|&j| chosen[j]).collect())),
    }
}
