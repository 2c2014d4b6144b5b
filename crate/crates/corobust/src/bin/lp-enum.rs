//! Exhaustive 0-1 LP solver for small CPLEX LP files.
//!
//! Speaks the external MILP protocol: `lp-enum [--time-limit S] INPUT OUTPUT`.
//! Only pure binary programs with linear constraints are accepted, with at
//! most 24 variables. On timeout it writes the best assignment found so far
//! under `status timeout`, or just the status when none was found.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};

const MAX_VARS: usize = 24;

#[derive(Debug)]
struct Constraint {
    terms: Vec<(usize, f64)>,
    op: Rel,
    rhs: f64,
}

#[derive(Debug, Clone, Copy)]
enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Default)]
struct Program {
    maximize: bool,
    objective: Vec<(usize, f64)>,
    constraints: Vec<Constraint>,
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Program {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    /// Parses `[name:] [+|-] [coef] var ...`, stopping at a relation.
    fn terms<'t>(&mut self, tokens: &mut std::iter::Peekable<impl Iterator<Item = &'t str>>) -> Result<Vec<(usize, f64)>> {
        let mut out = Vec::new();
        let (mut sign, mut coef) = (1.0, None::<f64>);
        while let Some(&tok) = tokens.peek() {
            if matches!(tok, "<=" | ">=" | "=" | "=<" | "=>") {
                break;
            }
            tokens.next();
            match tok {
                "+" => sign = 1.0,
                "-" => sign = -1.0,
                t if t.ends_with(':') => {}
                t => match t.parse::<f64>() {
                    Ok(c) => coef = Some(c),
                    Err(_) => {
                        let v = self.var(t);
                        out.push((v, sign * coef.unwrap_or(1.0)));
                        sign = 1.0;
                        coef = None;
                    }
                },
            }
        }
        if coef.is_some() {
            bail!("dangling coefficient");
        }
        Ok(out)
    }

    fn parse(text: &str) -> Result<Program> {
        let mut p = Program::default();
        let mut section = "";
        let mut binaries = Vec::new();
        for (l, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('\\') {
                continue;
            }
            let lower = line.to_ascii_lowercase();
            match lower.as_str() {
                "maximize" | "maximum" | "max" => {
                    p.maximize = true;
                    section = "obj";
                    continue;
                }
                "minimize" | "minimum" | "min" => {
                    section = "obj";
                    continue;
                }
                "subject to" | "such that" | "st" | "s.t." => {
                    section = "st";
                    continue;
                }
                "binary" | "binaries" | "bin" => {
                    section = "bin";
                    continue;
                }
                "end" => break,
                _ => {}
            }
            let mut tokens = line.split_whitespace().peekable();
            let ctx = || format!("line {}", l + 1);
            match section {
                "obj" => {
                    let terms = p.terms(&mut tokens).with_context(ctx)?;
                    p.objective.extend(terms);
                }
                "st" => {
                    let terms = p.terms(&mut tokens).with_context(ctx)?;
                    let op = match tokens.next() {
                        Some("<=" | "=<") => Rel::Le,
                        Some(">=" | "=>") => Rel::Ge,
                        Some("=") => Rel::Eq,
                        _ => bail!("{}: missing relation", ctx()),
                    };
                    let rhs: f64 = tokens.next().with_context(ctx)?.parse().with_context(ctx)?;
                    p.constraints.push(Constraint { terms, op, rhs });
                }
                "bin" => binaries.extend(line.split_whitespace().map(str::to_string)),
                _ => bail!("{}: unsupported section or content", ctx()),
            }
        }
        for b in &binaries {
            p.var(b);
        }
        let declared: std::collections::BTreeSet<&String> = binaries.iter().collect();
        if let Some(free) = p.names.iter().find(|n| !declared.contains(n)) {
            bail!("variable {free} is not binary");
        }
        Ok(p)
    }
}

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let mut limit = None;
    let mut files = Vec::new();
    while let Some(a) = args.next() {
        if a == "--time-limit" {
            let s: f64 = args.next().context("--time-limit needs a value")?.parse()?;
            limit = Some(Duration::from_secs_f64(s.max(0.0)));
        } else {
            files.push(a);
        }
    }
    let [input, output] = files.as_slice() else {
        bail!("usage: lp-enum [--time-limit S] INPUT OUTPUT");
    };
    let p = Program::parse(&std::fs::read_to_string(input)?)?;
    let n = p.names.len();
    if n > MAX_VARS {
        bail!("{n} variables; at most {MAX_VARS} supported");
    }
    let start = Instant::now();
    let mut best: Option<(f64, u32)> = None;
    let mut timed_out = false;
    for mask in 0u32..(1u32 << n) {
        if mask % 4096 == 0 && limit.is_some_and(|l| start.elapsed() > l) {
            timed_out = true;
            break;
        }
        let x = |v: usize| f64::from((mask >> v) & 1);
        let feasible = p.constraints.iter().all(|c| {
            let lhs: f64 = c.terms.iter().map(|&(v, a)| a * x(v)).sum();
            match c.op {
                Rel::Le => lhs <= c.rhs + 1e-9,
                Rel::Ge => lhs >= c.rhs - 1e-9,
                Rel::Eq => (lhs - c.rhs).abs() <= 1e-9,
            }
        });
        if !feasible {
            continue;
        }
        let obj: f64 = p.objective.iter().map(|&(v, a)| a * x(v)).sum();
        let better = match best {
            None => true,
            Some((b, _)) => if p.maximize { obj > b } else { obj < b },
        };
        if better {
            best = Some((obj, mask));
        }
    }
    let mut out = String::new();
    let status = match (best, timed_out) {
        (_, true) => "timeout",
        (Some(_), false) => "optimal",
        (None, false) => "infeasible",
    };
    out.push_str(&format!("status {status}\n"));
    if let Some((_, mask)) = best {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| p.names[a].cmp(&p.names[b]));
        for v in order {
            out.push_str(&format!("{} {}\n", p.names[v], (mask >> v) & 1));
        }
    }
    std::fs::write(output, out)?;
    Ok(())
}
