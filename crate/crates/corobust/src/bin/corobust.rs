use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use corobust::bridge::{payload_json, serve_tcp, Session};
use corobust::calibrate::{calibrate, scaled_limit, CalibrationProfile, CALIBRATION_SAMPLES};
use corobust::dataset::{generate_dataset, read_instance, Dataset, DatasetSpec, Split};
use corobust::experiment::{run_experiment, ExperimentConfig, ExperimentReport};
use corobust::handle::SolverHandle;
use corobust_core::attack::{AttackConfig, AttackMethod};
use corobust_core::{Outcome, Solver};

#[derive(Parser)]
#[command(name = "corobust", version, about = "Attack combinatorial-optimization solvers with no-worse-optimum edits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Test,
}

impl From<SplitArg> for Split {
    fn from(s: SplitArg) -> Split {
        match s {
            SplitArg::Train => Split::Train,
            SplitArg::Test => Split::Test,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
    Md,
}

#[derive(clap::Args)]
struct Limits {
    /// Uniform wall-clock limit for external solvers, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Calibration profile used to rescale --time-limit for this machine.
    /// Its speed_base is kept and the current speed is measured again.
    #[arg(long, requires = "time_limit")]
    calibration: Option<PathBuf>,
}

impl Limits {
    fn resolve(&self) -> Result<Option<Duration>> {
        let Some(uniform) = self.time_limit else { return Ok(None) };
        let secs = match &self.calibration {
            Some(path) => {
                let stored: CalibrationProfile = serde_json::from_str(&std::fs::read_to_string(path)?)
                    .with_context(|| format!("reading {}", path.display()))?;
                stored.check()?;
                let solver = SolverHandle::resolve(&stored.solver, None)?;
                let profile = calibrate(&solver, Some(stored.speed_base), stored.samples)?;
                eprintln!("calibrated: speed_base {} speed_now {}", profile.speed_base, profile.speed_now);
                scaled_limit(&profile, uniform)
            }
            None => uniform,
        };
        Ok(Some(Duration::from_secs_f64(secs.max(0.0))))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset from a JSON spec.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one instance file and print the answer as JSON.
    Solve {
        #[arg(long)]
        solver: String,
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Run a solver x attacker grid over a dataset split.
    Attack {
        /// Comma-separated solver names.
        #[arg(long, value_delimiter = ',', required = true)]
        solver: Vec<String>,
        /// Comma-separated attackers: baseline, ra, og, sa, beam.
        #[arg(long, value_delimiter = ',', required = true)]
        attacker: Vec<String>,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "test")]
        split: SplitArg,
        /// Edit budget K; per-problem default when omitted.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials per instance; per-attacker default when omitted.
        #[arg(long)]
        trials: Option<usize>,
        /// Output directory for cells and reports.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Measure solver speed on the fixed calibration instance.
    Calibrate {
        #[arg(long, default_value = "mc-greedy")]
        solver: String,
        #[arg(long, default_value_t = CALIBRATION_SAMPLES)]
        samples: usize,
        /// Reference speed (solves per second); this machine when omitted.
        #[arg(long)]
        speed_base: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Serve the attack environment over stdio, or TCP with --port.
    Serve {
        #[arg(long)]
        solver: String,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "train")]
        split: SplitArg,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        port: Option<u16>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Rebuild a report from the cell files of an attack run.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: ReportFormat,
    },
}

fn cell_dir(out: &Path) -> PathBuf {
    out.join("cells")
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate { spec, out } => {
            let spec: DatasetSpec = serde_json::from_str(&std::fs::read_to_string(&spec)?)
                .with_context(|| format!("reading {}", spec.display()))?;
            let m = generate_dataset(&spec, &out)?;
            eprintln!("wrote {} train and {} test instances to {}", m.train.len(), m.test.len(), out.display());
        }
        Command::Solve { solver, instance, limits } => {
            let handle = SolverHandle::resolve(&solver, limits.resolve()?)?;
            let q = read_instance(&instance)?;
            let s = handle.solve(&q)?;
            let outcome = match s.outcome {
                Outcome::Solved => "solved",
                Outcome::Infeasible => "infeasible",
                Outcome::Timeout => "timeout",
            };
            let mut v = serde_json::json!({
                "solver": handle.name(),
                "kind": q.kind().as_str(),
                "sense": s.sense.as_str(),
                "cost": s.cost,
                "outcome": outcome,
                "solution": payload_json(&s.payload),
            });
            if let Some(t) = handle.last_wall_time() {
                v["wall_seconds"] = serde_json::json!(t.as_secs_f64());
            }
            println!("{v}");
        }
        Command::Attack { solver, attacker, dataset, split, budget, seed, trials, out, limits } => {
            let limit = limits.resolve()?;
            let handles = solver.iter().map(|s| SolverHandle::resolve(s, limit)).collect::<Result<Vec<_>, _>>()?;
            let methods = attacker.iter().map(|a| a.parse::<AttackMethod>()).collect::<Result<Vec<_>, _>>()?;
            let ds = Dataset::open(&dataset)?;
            let split = Split::from(split);
            let instances = ds.load(split)?;
            let cfg = ExperimentConfig { budget, seed, trials, cell_dir: Some(cell_dir(&out)) };
            let name = format!("{}/{}", ds.name(), split.as_str());
            let report = run_experiment(&handles, &methods, &name, &instances, &cfg);
            report.write(&out)?;
            print!("{}", report.to_markdown());
        }
        Command::Calibrate { solver, samples, speed_base, out, limits } => {
            let handle = SolverHandle::resolve(&solver, limits.resolve()?)?;
            let profile = calibrate(&handle, speed_base, samples)?;
            let text = serde_json::to_string_pretty(&profile)? + "\n";
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
        }
        Command::Serve { solver, dataset, split, budget, port, limits } => {
            let handle = SolverHandle::resolve(&solver, limits.resolve()?)?;
            let ds = Dataset::open(&dataset)?;
            let instances = ds.load(split.into())?;
            let Some(first) = instances.first() else { bail!("dataset split is empty") };
            let budget = budget.unwrap_or_else(|| AttackConfig::default_budget(first.1.kind()));
            match port {
                Some(p) => serve_tcp(("127.0.0.1", p), Arc::new(handle), Arc::new(instances), budget)?,
                None => Session::new(&handle, &instances, budget).run(io::stdin().lock(), io::stdout().lock())?,
            }
        }
        Command::Report { input, format } => {
            let dir = if cell_dir(&input).is_dir() { cell_dir(&input) } else { input };
            let report = ExperimentReport::from_cell_dir(&dir)?;
            match format {
                ReportFormat::Csv => print!("{}", report.to_csv()),
                ReportFormat::Json => print!("{}", report.to_json()),
                ReportFormat::Md => print!("{}", report.to_markdown()),
            }
        }
    }
    Ok(())
}
