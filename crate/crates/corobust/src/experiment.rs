//! Solver x attacker x dataset grids and their reports.
//!
//! Every (solver, attacker, instance) cell is run independently and written
//! to `<cell_dir>/<solver>__<attacker>__<dataset>__<index>.json`. A rerun
//! with the same budget and seed reuses existing cell files, so an
//! interrupted grid resumes where it stopped. Rows are aggregated from the
//! raw per-trial costs kept in the cells.
//!
//! CSV columns, in order:
//!
//! | column          | meaning                                                      |
//! |-----------------|--------------------------------------------------------------|
//! | `solver`        | solver name                                                  |
//! | `attacker`      | `baseline`, `ra`, `og`, `sa` or `beam`                       |
//! | `dataset`       | dataset label                                                |
//! | `instances`     | cells that ran without error                                 |
//! | `trials`        | trials per instance                                          |
//! | `clean_mean`    | mean clean cost                                              |
//! | `attacked_mean` | mean over instances of the per-instance mean attacked cost   |
//! | `attacked_std`  | mean over instances of the population std over trials        |
//! | `gain_mean`     | mean degradation over all trials                             |
//! | `success_rate`  | share of trials with degradation > 0                         |
//! | `evaluations`   | total solver calls made by the attacker                      |
//! | `failures`      | cells that ended in an error                                 |
//!
//! Wall time is only reported in JSON, so CSV output is byte-identical across
//! reruns.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use corobust_core::attack::{self, derive_seed, AttackConfig, AttackMethod, RandomPolicy};
use corobust_core::{Instance, Solver};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::handle::SolverHandle;

pub const CSV_COLUMNS: [&str; 12] = [
    "solver",
    "attacker",
    "dataset",
    "instances",
    "trials",
    "clean_mean",
    "attacked_mean",
    "attacked_std",
    "gain_mean",
    "success_rate",
    "evaluations",
    "failures",
];

/// JSON has no infinities; flagged external runs can produce them.
mod float_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(serde::Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    #[serde(with = "float_repr")]
    pub attacked_cost: f64,
    #[serde(with = "float_repr")]
    pub gain: f64,
    pub evaluations: usize,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub solver: String,
    pub attacker: String,
    pub dataset: String,
    pub instance: String,
    pub index: usize,
    pub budget: usize,
    pub seed: u64,
    #[serde(with = "float_repr")]
    pub clean_cost: f64,
    pub trials: Vec<TrialRecord>,
    pub error: Option<String>,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentConfig {
    /// Edit budget; the per-problem default when `None`.
    pub budget: Option<usize>,
    pub seed: u64,
    /// Trials per cell; each attacker's declared count when `None`.
    pub trials: Option<usize>,
    /// Where cell files are kept. Without it nothing is persisted.
    pub cell_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub solver: String,
    pub attacker: String,
    pub dataset: String,
    pub instances: usize,
    pub trials: usize,
    pub clean_mean: f64,
    pub attacked_mean: f64,
    pub attacked_std: f64,
    pub gain_mean: f64,
    pub success_rate: f64,
    pub evaluations: usize,
    pub failures: usize,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub cells: Vec<CellRecord>,
}

fn cell_file(solver: &str, attacker: &str, dataset: &str, index: usize) -> String {
    let clean = |s: &str| s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect::<String>();
    format!("{}__{}__{}__{index:04}.json", clean(solver), clean(attacker), clean(dataset))
}

pub fn trial_seed(base: u64, instance: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(base, instance as u64), trial as u64)
}

pub fn run_experiment(
    solvers: &[SolverHandle],
    attackers: &[AttackMethod],
    dataset: &str,
    instances: &[(String, Instance)],
    cfg: &ExperimentConfig,
) -> ExperimentReport {
    let mut jobs = Vec::new();
    for s in solvers {
        for &a in attackers {
            for (i, (name, q)) in instances.iter().enumerate() {
                jobs.push((s, a, i, name.as_str(), q));
            }
        }
    }
    if let Some(dir) = &cfg.cell_dir {
        let _ = fs::create_dir_all(dir);
    }
    let cells: Vec<CellRecord> =
        jobs.par_iter().map(|&(s, a, i, name, q)| cached_cell(s, a, dataset, i, name, q, cfg)).collect();
    ExperimentReport::from_cells(cells)
}

fn cached_cell(
    solver: &SolverHandle,
    method: AttackMethod,
    dataset: &str,
    index: usize,
    name: &str,
    q: &Instance,
    cfg: &ExperimentConfig,
) -> CellRecord {
    let budget = cfg.budget.unwrap_or_else(|| AttackConfig::default_budget(q.kind()));
    let trials = cfg.trials.unwrap_or_else(|| method.experiment_trials());
    let path = cfg.cell_dir.as_ref().map(|d| d.join(cell_file(solver.name(), method.as_str(), dataset, index)));
    if let Some(old) = path.as_deref().and_then(read_cell) {
        if old.budget == budget && old.seed == cfg.seed && old.trials.len() == trials && old.error.is_none() {
            return old;
        }
    }
    let cell = run_cell(solver, method, dataset, index, name, q, budget, trials, cfg.seed);
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(&cell).expect("cell serializes") + "\n";
        let _ = fs::write(path, text);
    }
    cell
}

fn read_cell(path: &Path) -> Option<CellRecord> {
    serde_json::from_str(&fs::read_to_string(path).ok()?).ok()
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    solver: &SolverHandle,
    method: AttackMethod,
    dataset: &str,
    index: usize,
    name: &str,
    q: &Instance,
    budget: usize,
    trials: usize,
    seed: u64,
) -> CellRecord {
    let start = Instant::now();
    let mut cell = CellRecord {
        solver: solver.name().to_string(),
        attacker: method.as_str().to_string(),
        dataset: dataset.to_string(),
        instance: name.to_string(),
        index,
        budget,
        seed,
        clean_cost: f64::NAN,
        trials: Vec::with_capacity(trials),
        error: None,
        wall_seconds: 0.0,
    };
    if !solver.supports(q.kind()) {
        cell.error = Some(format!("{} does not solve {}", solver.name(), q.kind()));
        return cell;
    }
    for t in 0..trials {
        let mut acfg = AttackConfig::tuned(q.kind(), method);
        acfg.budget = budget;
        acfg.seed = trial_seed(seed, index, t);
        let result = match method {
            AttackMethod::Beam => attack::attack_beam(&mut RandomPolicy::new(acfg.seed), solver, q, &acfg),
            _ => attack::run(method, solver, q, &acfg),
        };
        match result {
            Ok(r) => {
                cell.clean_cost = r.clean_cost;
                cell.trials.push(TrialRecord {
                    seed: acfg.seed,
                    attacked_cost: r.best_cost,
                    gain: r.gain,
                    evaluations: r.evaluations,
                    steps: r.trace.len(),
                });
            }
            Err(e) => {
                cell.error = Some(e.to_string());
                break;
            }
        }
    }
    cell.wall_seconds = start.elapsed().as_secs_f64();
    cell
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs.iter().copied());
    mean(xs.iter().map(|x| (x - m) * (x - m))).sqrt()
}

impl ExperimentReport {
    /// Aggregates cells into rows ordered by (dataset, solver, attacker).
    pub fn from_cells(mut cells: Vec<CellRecord>) -> Self {
        cells.sort_by(|a, b| {
            (&a.dataset, &a.solver, &a.attacker, a.index).cmp(&(&b.dataset, &b.solver, &b.attacker, b.index))
        });
        let mut rows = Vec::new();
        for group in cells.chunk_by(|a, b| (&a.dataset, &a.solver, &a.attacker) == (&b.dataset, &b.solver, &b.attacker)) {
            let ok: Vec<&CellRecord> = group.iter().filter(|c| c.error.is_none()).collect();
            let all_trials = || ok.iter().flat_map(|c| c.trials.iter());
            let trial_count = all_trials().count();
            rows.push(ReportRow {
                solver: group[0].solver.clone(),
                attacker: group[0].attacker.clone(),
                dataset: group[0].dataset.clone(),
                instances: ok.len(),
                trials: ok.iter().map(|c| c.trials.len()).max().unwrap_or(0),
                clean_mean: mean(ok.iter().map(|c| c.clean_cost)),
                attacked_mean: mean(ok.iter().map(|c| mean(c.trials.iter().map(|t| t.attacked_cost)))),
                attacked_std: mean(ok.iter().map(|c| {
                    std_dev(&c.trials.iter().map(|t| t.attacked_cost).collect::<Vec<_>>())
                })),
                gain_mean: mean(all_trials().map(|t| t.gain)),
                success_rate: if trial_count == 0 {
                    f64::NAN
                } else {
                    all_trials().filter(|t| t.gain > 0.0).count() as f64 / trial_count as f64
                },
                evaluations: all_trials().map(|t| t.evaluations).sum(),
                failures: group.len() - ok.len(),
                wall_seconds: group.iter().map(|c| c.wall_seconds).sum(),
            });
        }
        ExperimentReport { rows, cells }
    }

    /// Loads every cell file in `dir`.
    pub fn from_cell_dir(dir: &Path) -> std::io::Result<Self> {
        let mut cells = Vec::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for p in paths {
            let cell = read_cell(&p).ok_or_else(|| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: not a cell file", p.display()))
            })?;
            cells.push(cell);
        }
        Ok(Self::from_cells(cells))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.solver.clone(),
                r.attacker.clone(),
                r.dataset.clone(),
                r.instances.to_string(),
                r.trials.to_string(),
                r.clean_mean.to_string(),
                r.attacked_mean.to_string(),
                r.attacked_std.to_string(),
                r.gain_mean.to_string(),
                r.success_rate.to_string(),
                r.evaluations.to_string(),
                r.failures.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from(
            "| solver | attacker | dataset | clean | attacked | success | evaluations | failures |\n\
             |---|---|---|---|---|---|---|---|\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {:.4} | {:.4} ± {:.4} | {:.1}% | {} | {} |",
                r.solver,
                r.attacker,
                r.dataset,
                r.clean_mean,
                r.attacked_mean,
                r.attacked_std,
                100.0 * r.success_rate,
                r.evaluations,
                r.failures
            );
        }
        s
    }

    /// Writes `report.csv`, `report.json` and `report.md` into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.csv"), self.to_csv())?;
        fs::write(dir.join("report.json"), self.to_json())?;
        fs::write(dir.join("report.md"), self.to_markdown())
    }
}
