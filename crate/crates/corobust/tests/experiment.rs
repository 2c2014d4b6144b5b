use std::fs;

use corobust::dataset::{generate_instance, SizeSpec};
use corobust::experiment::{run_experiment, trial_seed, ExperimentConfig, ExperimentReport, CSV_COLUMNS};
use corobust::handle::SolverHandle;
use corobust_core::attack::AttackMethod;
use corobust_core::{Heuristic, Instance, Solver};

fn atsp(count: u64) -> Vec<(String, Instance)> {
    (0..count).map(|s| (format!("q{s}"), generate_instance(&SizeSpec::Atsp { cities: 7 }, s))).collect()
}

fn solvers() -> Vec<SolverHandle> {
    vec![SolverHandle::builtin(Heuristic::NearestNeighbour), SolverHandle::builtin(Heuristic::FurthestInsertion)]
}

fn small_cfg(seed: u64) -> ExperimentConfig {
    ExperimentConfig { budget: Some(3), seed, trials: Some(3), cell_dir: None }
}

#[test]
fn zero_budget_leaves_costs_unchanged() {
    let insts = atsp(3);
    let cfg = ExperimentConfig { budget: Some(0), seed: 1, trials: Some(4), cell_dir: None };
    let report = run_experiment(&solvers(), &AttackMethod::ALL, "atsp-7", &insts, &cfg);
    assert_eq!(report.rows.len(), 10);
    for r in &report.rows {
        assert_eq!(r.attacked_mean, r.clean_mean, "{r:?}");
        assert_eq!(r.attacked_std, 0.0);
        assert_eq!(r.gain_mean, 0.0);
        assert_eq!(r.success_rate, 0.0);
        assert_eq!(r.evaluations, 0);
        assert_eq!((r.instances, r.trials, r.failures), (3, 4, 0));
    }
}

#[test]
fn csv_is_identical_across_runs_and_thread_counts() {
    let insts = atsp(4);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_experiment(&solvers(), &AttackMethod::ALL, "atsp-7", &insts, &small_cfg(5)).to_csv())
    };
    let a = run(1);
    assert_eq!(a, run(4));
    assert_eq!(a, run(3));
    assert_eq!(a.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(a.lines().count(), 11);
    let other = run_experiment(&solvers(), &AttackMethod::ALL, "atsp-7", &insts, &small_cfg(6)).to_csv();
    assert_ne!(a, other);
}

#[test]
fn rows_are_recomputable_from_cells() {
    let insts = atsp(5);
    let report = run_experiment(&solvers(), &[AttackMethod::Baseline, AttackMethod::RandomSearch], "atsp-7", &insts, &small_cfg(2));
    for row in &report.rows {
        let cells: Vec<_> =
            report.cells.iter().filter(|c| c.solver == row.solver && c.attacker == row.attacker).collect();
        assert_eq!(cells.len(), 5);
        let h: Heuristic = row.solver.parse().unwrap();
        let mut attacked_means = Vec::new();
        let mut stds = Vec::new();
        let mut gains = Vec::new();
        for c in &cells {
            assert_eq!(c.clean_cost, h.solve(&insts[c.index].1).unwrap().cost);
            let costs: Vec<f64> = c.trials.iter().map(|t| t.attacked_cost).collect();
            let m = costs.iter().sum::<f64>() / costs.len() as f64;
            let var = costs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / costs.len() as f64;
            attacked_means.push(m);
            stds.push(var.sqrt());
            for t in &c.trials {
                assert_eq!(t.gain, t.attacked_cost - c.clean_cost);
                gains.push(t.gain);
            }
            let seeds: Vec<u64> = c.trials.iter().map(|t| t.seed).collect();
            assert_eq!(seeds, (0..3).map(|t| trial_seed(2, c.index, t)).collect::<Vec<_>>());
        }
        let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!((row.attacked_mean - avg(&attacked_means)).abs() < 1e-6);
        assert!((row.attacked_std - avg(&stds)).abs() < 1e-6);
        assert!((row.gain_mean - avg(&gains)).abs() < 1e-6);
        let wins = gains.iter().filter(|&&g| g > 0.0).count() as f64 / gains.len() as f64;
        assert_eq!(row.success_rate, wins);
        if row.attacker == "ra" {
            // N rollouts of K steps per trial
            assert_eq!(row.evaluations, 5 * 3 * 130 * 3);
        }
    }
}

#[test]
fn interrupted_grids_resume_from_cell_files() {
    let insts = atsp(3);
    let dir = tempfile::tempdir().unwrap();
    let cells = dir.path().join("cells");
    let cfg = ExperimentConfig { cell_dir: Some(cells.clone()), ..small_cfg(9) };
    let methods = [AttackMethod::Baseline, AttackMethod::OptimumGuided];
    let first = run_experiment(&solvers(), &methods, "atsp-7", &insts, &cfg);
    let mut files: Vec<_> = fs::read_dir(&cells).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    assert_eq!(files.len(), 12);
    assert_eq!(files[0], "atsp-furthest-insertion__baseline__atsp-7__0000.json");

    // Simulate an interruption: drop some cells, then rerun.
    fs::remove_file(cells.join(&files[0])).unwrap();
    fs::remove_file(cells.join(&files[7])).unwrap();
    let resumed = run_experiment(&solvers(), &methods, "atsp-7", &insts, &cfg);
    assert_eq!(resumed.to_csv(), first.to_csv());
    assert_eq!(ExperimentReport::from_cell_dir(&cells).unwrap().to_csv(), first.to_csv());

    // A stored cell is reused as is when the settings match.
    let path = cells.join(&files[3]);
    let text = fs::read_to_string(&path).unwrap();
    let mut cell: serde_json::Value = serde_json::from_str(&text).unwrap();
    cell["trials"][0]["attacked_cost"] = serde_json::json!(1.0);
    fs::write(&path, serde_json::to_string(&cell).unwrap()).unwrap();
    let reused = run_experiment(&solvers(), &methods, "atsp-7", &insts, &cfg);
    assert_ne!(reused.to_csv(), first.to_csv());

    // and recomputed when they do not.
    let changed = run_experiment(&solvers(), &methods, "atsp-7", &insts, &ExperimentConfig { budget: Some(2), ..cfg.clone() });
    let rerun = run_experiment(&solvers(), &methods, "atsp-7", &insts, &ExperimentConfig { budget: Some(2), ..small_cfg(9) });
    assert_eq!(changed.to_csv(), rerun.to_csv());
}

#[test]
fn unsupported_pairs_are_failures() {
    let insts = atsp(2);
    let handles = [SolverHandle::builtin(Heuristic::GreedyCover)];
    let report = run_experiment(&handles, &[AttackMethod::RandomSearch], "atsp-7", &insts, &small_cfg(0));
    let row = &report.rows[0];
    assert_eq!((row.instances, row.failures), (0, 2));
    assert!(report.cells.iter().all(|c| c.error.as_deref().is_some_and(|e| e.contains("does not solve"))));
}

#[test]
fn reports_write_all_formats() {
    let insts = atsp(2);
    let report = run_experiment(&solvers(), &[AttackMethod::Annealing], "atsp-7", &insts, &small_cfg(3));
    let dir = tempfile::tempdir().unwrap();
    report.write(dir.path()).unwrap();
    assert_eq!(fs::read_to_string(dir.path().join("report.csv")).unwrap(), report.to_csv());
    let back: ExperimentReport = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(back.to_csv(), report.to_csv());
    let md = fs::read_to_string(dir.path().join("report.md")).unwrap();
    assert_eq!(md.lines().count(), 4);
}
