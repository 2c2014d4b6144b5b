//! Acceptance checks P1-P10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.
//!
//! Run alone with `cargo test -p corobust --test acceptance`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use corobust::bridge::Session;
use corobust::calibrate::{scaled_limit, CalibrationProfile};
use corobust::dataset::{generate_dataset, generate_instance, Dataset, DatasetSpec, SizeSpec, Split};
use corobust::experiment::{run_experiment, ExperimentConfig};
use corobust::format::{deserialize_instance, serialize_instance};
use corobust::handle::SolverHandle;
use corobust_core::attack::{
    self, attack_og, attack_ra, attack_sa, AnnealingParams, AttackConfig, AttackMethod,
};
use corobust_core::problems::candidates::candidates;
use corobust_core::problems::dag::simulate;
use corobust_core::problems::exact::brute_force_optimum;
use corobust_core::{
    Color, CoverageBudget, DagInstance, Heuristic, Instance, Job, Outcome, Payload, ProblemKind, Sense, Solution,
    SolveError, Solver,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

type Verdict = Result<String, String>;
type Check = (&'static str, &'static str, fn() -> Verdict);

fn main() {
    let checks: [Check; 10] = [
        ("P1", "optimum never worsens under attack", p1),
        ("P2", "degradation implies a wider optimality gap", p2),
        ("P3", "greedy max cover within 1-1/e of optimum", p3),
        ("P4", "searching attackers beat the random baseline", p4),
        ("P5", "annealing acceptance law", p5),
        ("P6", "solver-call accounting", p6),
        ("P7", "calibrated time limit", p7),
        ("P8", "determinism and round-trip", p8),
        ("P9", "builtin solvers stay feasible", p9),
        ("P10", "bridge transcript replay", p10),
    ];
    let results: Vec<(Verdict, Duration)> = checks
        .iter()
        .map(|&(_, _, f)| {
            let start = Instant::now();
            let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
            (r, start.elapsed())
        })
        .collect();
    let mut failed = 0;
    for ((id, title, _), (r, took)) in checks.iter().zip(results) {
        let (tag, detail) = match r {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{id:<4} {tag} {title}: {detail} [{:.1}s]", took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn first_heuristic(kind: ProblemKind) -> Heuristic {
    Heuristic::for_kind(kind).next().unwrap()
}

/// A small instance of each kind at the P1 size limits.
fn small(kind: ProblemKind, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = match kind {
        ProblemKind::Dag => SizeSpec::Dag { jobs: rng.random_range(2..=8), parents: rng.random_range(0.5..3.0) },
        ProblemKind::Atsp => SizeSpec::Atsp { cities: rng.random_range(3..=8) },
        ProblemKind::MaxCover => {
            let sets = rng.random_range(2..=6);
            SizeSpec::Mc { sets, elements: rng.random_range(3..=12), k: Some(rng.random_range(1..=sets)) }
        }
        ProblemKind::MaxCoverSeparate => {
            let blacks = rng.random_range(1..=2);
            SizeSpec::Mcscc {
                sets: rng.random_range(2..=5),
                blacks,
                whites: 20 * blacks,
                k_white: Some(rng.random_range(0..=20 * blacks)),
            }
        }
    };
    generate_instance(&size, rng.random())
}

const KINDS: [ProblemKind; 4] = [ProblemKind::Dag, ProblemKind::Atsp, ProblemKind::MaxCover, ProblemKind::MaxCoverSeparate];

/// Clean instance followed by three attacked states, each edit drawn from the
/// candidates of the first heuristic's answer. Draws that run out of
/// candidates early are replaced by the next draw.
fn chain(kind: ProblemKind, seed: u64) -> Vec<Instance> {
    let solver = first_heuristic(kind);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
    loop {
        let mut states = vec![small(kind, rng.random())];
        while states.len() < 4 {
            let q = states.last().unwrap();
            let c = candidates(q, &solver.solve(q).unwrap());
            if c.is_empty() {
                break;
            }
            let a = c[rng.random_range(0..c.len())];
            states.push(q.apply_action(&a).unwrap());
        }
        if states.len() == 4 {
            return states;
        }
    }
}

fn worse(sense: Sense, a: f64, b: f64) -> f64 {
    // how much `a` is worse than `b`
    match sense {
        Sense::Minimize => a - b,
        Sense::Maximize => b - a,
    }
}

fn p1() -> Verdict {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut edits = 0;
    for kind in KINDS {
        for seed in 0..100 {
            let states = chain(kind, seed);
            let opts: Vec<f64> = states.iter().map(|q| brute_force_optimum(q).unwrap().cost).collect();
            edits += states.len() - 1;
            for w in opts.windows(2) {
                if worse(kind.sense(), w[1], w[0]) > 1e-9 {
                    violations.push(format!("{kind} seed {seed}: {} -> {}", w[0], w[1]));
                }
            }
        }
    }
    let took = start.elapsed();
    let detail = format!("400 instances, {edits} edits, {} violations, {:.1}s", violations.len(), took.as_secs_f64());
    check(violations.is_empty() && edits == 1200 && took < Duration::from_secs(120), detail)
}

fn p2() -> Verdict {
    let (mut degraded, mut violations) = (0, 0);
    for kind in KINDS {
        let solver = first_heuristic(kind);
        for seed in 0..100 {
            let states = chain(kind, seed);
            let clean = &states[0];
            let gap = |q: &Instance| {
                let f = solver.solve(q).unwrap().cost;
                let opt = brute_force_optimum(q).unwrap().cost;
                (f, worse(kind.sense(), f, opt))
            };
            let (f0, g0) = gap(clean);
            for q in &states[1..] {
                let (f, g) = gap(q);
                if attack::degradation(kind.sense(), f0, f) > 0.0 {
                    degraded += 1;
                    if g <= g0 {
                        violations += 1;
                    }
                }
            }
        }
    }
    check(violations == 0 && degraded > 0, format!("{degraded} degraded states, {violations} violations"))
}

fn p3() -> Verdict {
    let start = Instant::now();
    let mut worst_ratio = f64::INFINITY;
    let mut violations = 0;
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets = rng.random_range(2..=10);
        let size = SizeSpec::Mc { sets, elements: rng.random_range(4..=20), k: Some(rng.random_range(1..=sets)) };
        let q = generate_instance(&size, seed);
        let greedy = Heuristic::GreedyCover.solve(&q).unwrap().cost;
        let opt = brute_force_optimum(&q).unwrap().cost;
        if greedy < 0.632 * opt - 1e-9 {
            violations += 1;
        }
        worst_ratio = worst_ratio.min(greedy / opt);
    }
    let took = start.elapsed();
    check(
        violations == 0 && took < Duration::from_secs(30),
        format!("200 instances, worst ratio {worst_ratio:.4}, {violations} violations, {:.1}s", took.as_secs_f64()),
    )
}

/// One-sided paired t statistic of `a - b` over seeds.
fn paired_t(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let m = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return if m > 0.0 { f64::INFINITY } else if m == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    m / (var / n).sqrt()
}

/// Critical value of Student's t with 9 degrees of freedom, one-sided 95%.
const T_CRIT_9: f64 = 1.833;
const SEEDS: usize = 10;

fn p4() -> Verdict {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    let grids = [
        (SizeSpec::Atsp { cities: 20 }, Heuristic::NearestNeighbour),
        (SizeSpec::Mc { sets: 100, elements: 200, k: None }, Heuristic::GreedyCover),
    ];
    for (size, solver) in grids {
        let spec = DatasetSpec { size: size.clone(), train: 0, test: 20, seed: 2024 };
        let insts: Vec<(String, Instance)> = corobust::dataset::generate_instances(&spec)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(i, q)| (format!("{i}"), q))
            .collect();
        let methods = [AttackMethod::Baseline, AttackMethod::RandomSearch, AttackMethod::OptimumGuided, AttackMethod::Annealing];
        // Trial t of every cell plays the role of seed t.
        let cfg = ExperimentConfig { budget: None, seed: 7, trials: Some(SEEDS), cell_dir: None };
        let report = run_experiment(&[SolverHandle::builtin(solver)], &methods, &size.label(), &insts, &cfg);
        let per_seed = |m: AttackMethod| -> Vec<f64> {
            let cells: Vec<_> = report.cells.iter().filter(|c| c.attacker == m.as_str()).collect();
            (0..SEEDS).map(|t| cells.iter().map(|c| c.trials[t].gain).sum::<f64>() / cells.len() as f64).collect()
        };
        let success = |m: AttackMethod| report.rows.iter().find(|r| r.attacker == m.as_str()).unwrap().success_rate;
        let base = per_seed(AttackMethod::Baseline);
        let base_mean = base.iter().sum::<f64>() / SEEDS as f64;
        let mut parts = vec![format!("baseline gain {base_mean:.1} success {:.2}", success(AttackMethod::Baseline))];
        for m in &methods[1..] {
            let g = per_seed(*m);
            let t = paired_t(&g, &base);
            let mean = g.iter().sum::<f64>() / SEEDS as f64;
            ok &= t >= T_CRIT_9;
            parts.push(format!("{} gain {mean:.1} t={t:.2}", m.as_str()));
        }
        let (sb, sr) = (success(AttackMethod::Baseline), success(AttackMethod::RandomSearch));
        ok &= sb < sr;
        parts.push(format!("ra success {sr:.2}"));
        lines.push(format!("{}: {}", size.label(), parts.join(", ")));
    }
    let took = start.elapsed();
    ok &= took < Duration::from_secs(600);
    check(ok, format!("{}; {:.1}s", lines.join("; "), took.as_secs_f64()))
}

/// Cost is the number of precedence edges, so every removal is a unit loss.
struct EdgeCount;

impl Solver for EdgeCount {
    fn name(&self) -> &str {
        "edge-count"
    }

    fn solve(&self, q: &Instance) -> Result<Solution, SolveError> {
        let d = q.as_dag().unwrap();
        Ok(Solution {
            payload: Payload::Priority((0..d.job_count()).collect()),
            cost: d.edges().len() as f64,
            sense: Sense::Minimize,
            outcome: Outcome::Solved,
        })
    }
}

/// Cost falls with every removal, so every edit is a unit gain.
struct NegEdgeCount;

impl Solver for NegEdgeCount {
    fn name(&self) -> &str {
        "neg-edge-count"
    }

    fn solve(&self, q: &Instance) -> Result<Solution, SolveError> {
        let mut s = EdgeCount.solve(q)?;
        s.cost = -s.cost;
        Ok(s)
    }
}

fn complete_dag(n: usize) -> Instance {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    Instance::Dag(DagInstance::new(vec![Job::new(1.0, 0.1); n], edges).unwrap())
}

fn p5() -> Verdict {
    let draws = 10_000;
    let cfg = AttackConfig {
        budget: 2,
        trials: draws,
        beam: 1,
        samples: 1,
        annealing: AnnealingParams { initial_temperature: 1.0, decay: 0.5, beta: 1.0, eps: 0.0, relative_gain: false },
        seed: 42,
    };
    let r = attack_sa(&EdgeCount, &complete_dag(10), &cfg).map_err(|e| e.to_string())?;
    // Every restart proposes one unit-loss move and a second only if the first was taken.
    let rate = (r.evaluations - draws) as f64 / draws as f64;
    let target = (-1.0f64).exp();
    check((rate - target).abs() <= 0.02, format!("rate {rate:.4} vs e^-1 = {target:.4} over {draws} draws"))
}

fn p6() -> Verdict {
    let q = generate_instance(&SizeSpec::Atsp { cities: 10 }, 3);
    let mut cfg = AttackConfig { budget: 6, trials: 9, beam: 3, samples: 7, annealing: AnnealingParams::default(), seed: 1 };
    let mut fails = Vec::new();
    let mut expect = |what: &str, got: usize, want: usize| {
        if got != want {
            fails.push(format!("{what}: {got} != {want}"));
        }
    };
    let ra = attack_ra(&Heuristic::NearestNeighbour, &q, &cfg).unwrap();
    expect("RA N*K", ra.evaluations, 9 * 6);
    let og = attack_og(&Heuristic::NearestNeighbour, &q, &cfg).unwrap();
    expect("OG B*M*K", og.evaluations, 3 * 7 * 6);
    // Annealing: with only improving moves every step takes its first sample.
    let dag = complete_dag(8);
    let sa = attack_sa(&NegEdgeCount, &dag, &AttackConfig { samples: 1, ..cfg }).unwrap();
    expect("SA N*M*K (M=1)", sa.evaluations, 9 * 6);
    // and with only ruinous moves every restart tries M samples and stops.
    cfg.annealing = AnnealingParams { initial_temperature: 1.0, decay: 0.9, beta: 1e6, eps: 0.0, relative_gain: false };
    let sa = attack_sa(&EdgeCount, &dag, &cfg).unwrap();
    expect("SA N*M (all rejected)", sa.evaluations, 9 * 7);
    let sa = attack_sa(&Heuristic::NearestNeighbour, &q, &AttackConfig { annealing: AnnealingParams::default(), ..cfg }).unwrap();
    if sa.evaluations > 9 * 7 * 6 {
        fails.push(format!("SA bound: {} > N*M*K", sa.evaluations));
    }
    check(fails.is_empty(), if fails.is_empty() { "RA 54, OG 126, SA 54 / 63 / <= 378".into() } else { fails.join("; ") })
}

fn p7() -> Verdict {
    let pairs = [(0.5, 0.25, 1.0, 2.0), (4.0, 4.0, 60.0, 60.0), (10.0, 20.0, 30.0, 15.0), (1.0, 3.0, 9.0, 3.0), (2.5, 0.5, 0.2, 1.0)];
    let mut bad = Vec::new();
    for (base, now, uniform, want) in pairs {
        let p = CalibrationProfile { instance: "synthetic".into(), solver: "none".into(), samples: 20, speed_base: base, speed_now: now };
        let got = scaled_limit(&p, uniform);
        if (got - want).abs() > 1e-12 * want.abs().max(1.0) {
            bad.push(format!("({base}, {now}, {uniform}) -> {got}, want {want}"));
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "5 pairs exact, identity included".into() } else { bad.join("; ") })
}

fn dir_bytes(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

/// Fuzzed instance of `kind`: a generator draw with random parameters and up
/// to three random edits.
fn fuzzed(kind: ProblemKind, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let size = match kind {
        ProblemKind::Dag => SizeSpec::Dag { jobs: rng.random_range(1..=40), parents: rng.random_range(0.0..5.0) },
        ProblemKind::Atsp => SizeSpec::Atsp { cities: rng.random_range(2..=30) },
        ProblemKind::MaxCover => {
            let sets = rng.random_range(1..=40);
            SizeSpec::Mc { sets, elements: rng.random_range(1..=80), k: Some(rng.random_range(1..=sets)) }
        }
        ProblemKind::MaxCoverSeparate => {
            let blacks = rng.random_range(1..=3);
            SizeSpec::Mcscc {
                sets: rng.random_range(1..=30),
                blacks,
                whites: 20 * blacks,
                k_white: Some(rng.random_range(0..=20 * blacks)),
            }
        }
    };
    let mut q = generate_instance(&size, rng.random());
    let solver = first_heuristic(kind);
    for _ in 0..rng.random_range(0..=3) {
        let c = candidates(&q, &solver.solve(&q).unwrap());
        if c.is_empty() {
            break;
        }
        q = q.apply_action(&c[rng.random_range(0..c.len())]).unwrap();
    }
    q
}

fn p8() -> Verdict {
    let mut fails = Vec::new();
    // datasets
    for size in [
        SizeSpec::Dag { jobs: 20, parents: 2.0 },
        SizeSpec::Atsp { cities: 15 },
        SizeSpec::Mc { sets: 30, elements: 60, k: None },
        SizeSpec::Mcscc { sets: 10, blacks: 2, whites: 40, k_white: None },
    ] {
        let spec = DatasetSpec { size: size.clone(), train: 3, test: 3, seed: 99 };
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        generate_dataset(&spec, a.path()).unwrap();
        generate_dataset(&spec, b.path()).unwrap();
        if dir_bytes(a.path()) != dir_bytes(b.path()) {
            fails.push(format!("dataset {} differs", size.label()));
        }
    }
    // attack results
    for kind in KINDS {
        let q = fuzzed(kind, 5);
        let solver = first_heuristic(kind);
        for m in AttackMethod::ALL {
            let mut cfg = AttackConfig::tuned(kind, m);
            cfg.budget = 3;
            cfg.seed = 17;
            let run = || format!("{:?}", attack::run(m, &solver, &q, &cfg).unwrap());
            if run() != run() {
                fails.push(format!("{kind} {m} attack differs"));
            }
        }
    }
    // report CSVs
    let insts: Vec<(String, Instance)> = (0..3).map(|s| (format!("{s}"), fuzzed(ProblemKind::Atsp, s))).collect();
    let cfg = ExperimentConfig { budget: Some(3), seed: 8, trials: Some(2), cell_dir: None };
    let solvers = [SolverHandle::builtin(Heuristic::NearestNeighbour), SolverHandle::builtin(Heuristic::FurthestInsertion)];
    let csv = || run_experiment(&solvers, &AttackMethod::ALL, "fuzz", &insts, &cfg).to_csv();
    if csv() != csv() {
        fails.push("report CSV differs".into());
    }
    // round-trip
    let mut round = 0;
    for seed in 0..1000u64 {
        let q = fuzzed(KINDS[seed as usize % 4], 10_000 + seed);
        let text = serialize_instance(&q);
        match deserialize_instance(&text) {
            Ok(back) if back == q && serialize_instance(&back) == text => round += 1,
            Ok(_) => fails.push(format!("round-trip {seed} differs")),
            Err(e) => fails.push(format!("round-trip {seed}: {e}")),
        }
    }
    let detail = format!("4 datasets, 20 attack configs, report CSV, {round}/1000 round-trips");
    check(fails.is_empty(), if fails.is_empty() { detail } else { fails.join("; ") })
}

/// Checks `s` against the instance without the library's own evaluators.
fn feasibility(q: &Instance, s: &Solution) -> Result<(), String> {
    let perm = |v: &[usize], n: usize| {
        let set: BTreeSet<usize> = v.iter().copied().collect();
        v.len() == n && set.len() == n && set.iter().all(|&i| i < n)
    };
    match (q, &s.payload) {
        (Instance::Dag(d), Payload::Priority(p)) => {
            if !perm(p, d.job_count()) {
                return Err("priority is not a permutation".into());
            }
            let sched = simulate(d, p).map_err(|e| e.to_string())?;
            for &(u, v) in d.edges() {
                if sched.start[v] + 1e-9 < sched.start[u] + d.jobs()[u].duration {
                    return Err(format!("edge ({u},{v}) violated"));
                }
            }
            for &t in &sched.start {
                let load: f64 = (0..d.job_count())
                    .filter(|&j| sched.start[j] <= t + 1e-9 && t + 1e-9 < sched.start[j] + d.jobs()[j].duration)
                    .map(|j| d.jobs()[j].resource)
                    .sum();
                if load > 1.0 + 1e-9 {
                    return Err(format!("load {load} at {t}"));
                }
            }
            let makespan = (0..d.job_count()).map(|j| sched.start[j] + d.jobs()[j].duration).fold(0.0, f64::max);
            if (makespan - s.cost).abs() > 1e-9 * makespan.max(1.0) {
                return Err(format!("reported {} vs makespan {makespan}", s.cost));
            }
            Ok(())
        }
        (Instance::Atsp(a), Payload::Tour(t)) => {
            if !perm(t, a.cities()) {
                return Err("tour is not a permutation".into());
            }
            let n = t.len();
            let len: f64 = (0..n).map(|i| a.weight(t[i], t[(i + 1) % n])).sum();
            if (len - s.cost).abs() > 1e-9 * len.max(1.0) {
                return Err(format!("reported {} vs length {len}", s.cost));
            }
            Ok(())
        }
        (Instance::Coverage(c), Payload::Selection(sel)) => {
            let distinct: BTreeSet<usize> = sel.iter().copied().collect();
            if distinct.len() != sel.len() || distinct.iter().any(|&j| j >= c.set_count()) {
                return Err("selection has repeats or unknown sets".into());
            }
            let covered: BTreeSet<usize> = sel.iter().flat_map(|&j| c.members(j).iter().copied()).collect();
            match c.budget() {
                CoverageBudget::Sets(k) if sel.len() > k => return Err(format!("{} sets > k={k}", sel.len())),
                CoverageBudget::WhiteElements(k) => {
                    let whites = covered.iter().filter(|&&e| c.elements()[e].color == Color::White).count();
                    if whites > k {
                        return Err(format!("{whites} whites > k={k}"));
                    }
                }
                _ => {}
            }
            let value: f64 = covered
                .iter()
                .filter(|&&e| c.elements()[e].color == Color::Black)
                .map(|&e| c.elements()[e].weight)
                .sum();
            if (value - s.cost).abs() > 1e-9 * value.max(1.0) {
                return Err(format!("reported {} vs coverage {value}", s.cost));
            }
            Ok(())
        }
        _ => Err("payload does not match the instance".into()),
    }
}

fn p9() -> Verdict {
    let results: Vec<String> = KINDS
        .par_iter()
        .flat_map(|&kind| {
            (0..1000u64).into_par_iter().flat_map_iter(move |seed| {
                let q = fuzzed(kind, seed);
                Heuristic::for_kind(kind)
                    .filter_map(|h| match h.solve(&q) {
                        Ok(s) if s.outcome == Outcome::Solved => {
                            feasibility(&q, &s).err().map(|e| format!("{h} {kind} seed {seed}: {e}"))
                        }
                        Ok(s) => Some(format!("{h} {kind} seed {seed}: flagged {:?}", s.outcome)),
                        Err(e) => Some(format!("{h} {kind} seed {seed}: {e}")),
                    })
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    let detail = format!("4000 instances, 8 solvers, {} violations", results.len());
    check(results.is_empty(), if results.is_empty() { detail } else { format!("{detail}: {}", results[0]) })
}

fn p10() -> Verdict {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/bridge");
    let insts = Dataset::open(&root.join("dataset")).and_then(|d| d.load(Split::Train)).map_err(|e| e.to_string())?;
    let requests = std::fs::read_to_string(root.join("requests.jsonl")).map_err(|e| e.to_string())?;
    let expected = std::fs::read_to_string(root.join("responses.jsonl")).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    Session::new(&Heuristic::NearestNeighbour, &insts, 3).run(requests.as_bytes(), &mut out).map_err(|e| e.to_string())?;
    let got = String::from_utf8(out).map_err(|e| e.to_string())?;
    if got != expected {
        let line = got.lines().zip(expected.lines()).position(|(a, b)| a != b).unwrap_or(0);
        return Err(format!("replay differs at response {}", line + 1));
    }
    // Rewards: each is the cost increase of its step and they sum to the gain.
    let responses: Vec<Value> = got.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let steps: Vec<&Value> = responses.iter().filter(|r| r["op"] == "step" && r["ok"] == true).collect();
    let mut prev = responses.iter().find(|r| r["op"] == "reset").unwrap()["cost"].as_f64().unwrap();
    let mut sum = 0.0;
    for s in &steps {
        let cost = s["cost"].as_f64().unwrap();
        let reward = s["reward"].as_f64().unwrap();
        if reward != cost - prev {
            return Err(format!("reward {reward} != {cost} - {prev}"));
        }
        sum += reward;
        prev = cost;
    }
    let last = steps.last().unwrap();
    let terminal = steps.len() == 3 && last["done"] == true && steps[..2].iter().all(|s| s["done"] == false);
    let gain_ok = (last["gain"].as_f64().unwrap() - sum).abs() < 1e-9;
    check(
        terminal && gain_ok,
        format!("{} responses identical, 3 steps, reward sum {sum}, done at budget", responses.len()),
    )
}

