//! JSON-lines attack environment for external agents.
//!
//! One request per line, one response per line, strictly in order. Every
//! response carries `"ok"`; failures add `"error": {"code", "message"}` and
//! never end the session or touch the current episode.
//!
//! Requests:
//!
//! - `{"op":"info"}`: solver, budget and instance names.
//! - `{"op":"reset","instance":ID}`: start an episode on an instance given by
//!   index or name. Returns the state graph, the solver's answer, its cost and
//!   the candidate edits as `[a1, a2]` pairs.
//! - `{"op":"step","a1":A,"a2":B}`: apply one candidate edit. `reward` is the
//!   degradation of the new cost relative to the previous one, so rewards sum
//!   to the episode's total degradation. `done` is set once the budget is
//!   spent or no candidate remains.
//! - `{"op":"eval_beam","instance":ID,"beam":B}`: run the policy beam search
//!   on an instance, leaving any running episode alone. Scores come from an
//!   optional `"edge_scores":[[a1,a2,score],...]` table (unlisted edits score
//!   0), or otherwise from the client: the server writes
//!   `{"op":"score_request","state":...,"candidates":...}` and reads back one
//!   `{"op":"scores","scores":[...]}` line per expanded state. `"budget"`
//!   overrides the session budget.
//! - `{"op":"shutdown"}`: acknowledge and close.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::net::{TcpListener, ToSocketAddrs};
use std::sync::Arc;

use corobust_core::attack::{attack_beam, degradation, AttackConfig, AttackMethod, Policy, PolicyError};
use corobust_core::problems::candidates::candidates;
use corobust_core::{AttackAction, Instance, Payload, Solution, Solver};
use serde_json::{json, Value};

use crate::format::serialize_instance;

/// Machine-readable error codes.
pub mod code {
    pub const MALFORMED: &str = "malformed";
    pub const UNKNOWN_OP: &str = "unknown_op";
    pub const UNKNOWN_INSTANCE: &str = "unknown_instance";
    pub const NO_EPISODE: &str = "no_episode";
    pub const EPISODE_DONE: &str = "episode_done";
    pub const INVALID_ACTION: &str = "invalid_action";
    pub const SOLVER: &str = "solver_error";
    pub const POLICY: &str = "policy_error";
}

struct Episode {
    index: usize,
    clean_cost: f64,
    state: Instance,
    solution: Solution,
    candidates: Vec<AttackAction>,
    steps: usize,
}

pub struct Session<'a, S: ?Sized> {
    solver: &'a S,
    instances: &'a [(String, Instance)],
    budget: usize,
    episode: Option<Episode>,
}

struct Failure(&'static str, String);

type Reply = Result<Value, Failure>;

fn fail<T>(code: &'static str, message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(code, message.into()))
}

/// The instance as a JSON object, in the canonical file layout.
pub fn state_json(q: &Instance) -> Value {
    serde_json::from_str(&serialize_instance(q)).expect("canonical documents are valid JSON")
}

pub fn payload_json(p: &Payload) -> Value {
    match p {
        Payload::Priority(v) => json!({ "priority": v }),
        Payload::StartTimes(v) => json!({ "start_times": v }),
        Payload::Tour(v) => json!({ "tour": v }),
        Payload::Selection(v) => json!({ "selection": v }),
    }
}

fn pairs(actions: &[AttackAction]) -> Value {
    Value::Array(actions.iter().map(|a| json!([a.a1, a.a2])).collect())
}

impl<'a, S: Solver + ?Sized> Session<'a, S> {
    pub fn new(solver: &'a S, instances: &'a [(String, Instance)], budget: usize) -> Self {
        Session { solver, instances, budget, episode: None }
    }

    /// Serves requests until `shutdown` or end of input.
    pub fn run<R: BufRead, W: Write>(&mut self, mut reader: R, mut writer: W) -> io::Result<()> {
        let mut line = String::new();
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                return Ok(());
            }
            if line.trim().is_empty() {
                continue;
            }
            let (response, stop) = self.handle(&line, &mut reader, &mut writer)?;
            writeln!(writer, "{response}")?;
            writer.flush()?;
            if stop {
                return Ok(());
            }
        }
    }

    fn handle<R: BufRead, W: Write>(&mut self, line: &str, reader: &mut R, writer: &mut W) -> io::Result<(Value, bool)> {
        let request: Value = match serde_json::from_str(line) {
            Ok(v @ Value::Object(_)) => v,
            Ok(_) => return Ok((error_json(None, code::MALFORMED, "request must be a JSON object"), false)),
            Err(e) => return Ok((error_json(None, code::MALFORMED, &e.to_string()), false)),
        };
        let Some(op) = request.get("op").and_then(Value::as_str).map(str::to_string) else {
            return Ok((error_json(None, code::MALFORMED, "missing string field \"op\""), false));
        };
        let reply = match op.as_str() {
            "info" => Ok(self.info()),
            "reset" => self.reset(&request),
            "step" => self.step(&request),
            "eval_beam" => self.eval_beam(&request, reader, writer)?,
            "shutdown" => Ok(json!({})),
            _ => fail(code::UNKNOWN_OP, format!("unknown op {op:?}")),
        };
        let stop = op == "shutdown";
        Ok(match reply {
            Ok(Value::Object(mut m)) => {
                m.insert("ok".into(), Value::Bool(true));
                m.insert("op".into(), Value::String(op));
                (Value::Object(m), stop)
            }
            Ok(_) => unreachable!("handlers return objects"),
            Err(Failure(c, msg)) => (error_json(Some(&op), c, &msg), false),
        })
    }

    fn info(&self) -> Value {
        let names: Vec<&str> = self.instances.iter().map(|(n, _)| n.as_str()).collect();
        json!({ "solver": self.solver.name(), "budget": self.budget, "instances": names })
    }

    fn lookup(&self, request: &Value) -> Result<usize, Failure> {
        match request.get("instance") {
            Some(Value::Number(n)) => match n.as_u64() {
                Some(i) if (i as usize) < self.instances.len() => Ok(i as usize),
                _ => fail(code::UNKNOWN_INSTANCE, format!("no instance {n}")),
            },
            Some(Value::String(s)) => match self.instances.iter().position(|(name, _)| name == s) {
                Some(i) => Ok(i),
                None => fail(code::UNKNOWN_INSTANCE, format!("no instance {s:?}")),
            },
            _ => fail(code::MALFORMED, "\"instance\" must be an index or a name"),
        }
    }

    fn solve(&self, q: &Instance) -> Result<Solution, Failure> {
        self.solver.solve(q).map_err(|e| Failure(code::SOLVER, e.to_string()))
    }

    fn reset(&mut self, request: &Value) -> Reply {
        let index = self.lookup(request)?;
        let state = self.instances[index].1.clone();
        let solution = self.solve(&state)?;
        let cands = candidates(&state, &solution);
        self.episode = Some(Episode {
            index,
            clean_cost: solution.cost,
            state,
            solution,
            candidates: cands,
            steps: 0,
        });
        Ok(self.observation(None))
    }

    fn step(&mut self, request: &Value) -> Reply {
        let Some(ep) = self.episode.as_ref() else {
            return fail(code::NO_EPISODE, "call reset first");
        };
        let endpoint = |k: &str| request.get(k).and_then(Value::as_u64).map(|v| v as usize);
        let (Some(a1), Some(a2)) = (endpoint("a1"), endpoint("a2")) else {
            return fail(code::MALFORMED, "step needs integer fields a1 and a2");
        };
        if self.done(ep) {
            return fail(code::EPISODE_DONE, "episode is over; call reset");
        }
        let Some(&action) = ep.candidates.iter().find(|c| (c.a1, c.a2) == (a1, a2)) else {
            return fail(code::INVALID_ACTION, format!("({a1}, {a2}) is not a candidate"));
        };
        let next = ep.state.apply_action(&action).map_err(|e| Failure(code::INVALID_ACTION, e.to_string()))?;
        let solution = self.solve(&next)?;
        let reward = degradation(next.sense(), ep.solution.cost, solution.cost);
        let ep = self.episode.as_mut().expect("checked above");
        ep.candidates = candidates(&next, &solution);
        ep.state = next;
        ep.solution = solution;
        ep.steps += 1;
        Ok(self.observation(Some(reward)))
    }

    fn done(&self, ep: &Episode) -> bool {
        ep.steps >= self.budget || ep.candidates.is_empty()
    }

    fn observation(&self, reward: Option<f64>) -> Value {
        let ep = self.episode.as_ref().expect("episode present");
        let mut v = json!({
            "instance": ep.index,
            "step": ep.steps,
            "budget": self.budget,
            "done": self.done(ep),
            "cost": ep.solution.cost,
            "clean_cost": ep.clean_cost,
            "gain": degradation(ep.state.sense(), ep.clean_cost, ep.solution.cost),
            "candidates": pairs(&ep.candidates),
            "solution": payload_json(&ep.solution.payload),
            "state": state_json(&ep.state),
        });
        if let Some(r) = reward {
            v["reward"] = json!(r);
        }
        v
    }

    fn eval_beam<R: BufRead, W: Write>(&mut self, request: &Value, reader: &mut R, writer: &mut W) -> io::Result<Reply> {
        let index = match self.lookup(request) {
            Ok(i) => i,
            Err(f) => return Ok(Err(f)),
        };
        let q = &self.instances[index].1;
        let mut cfg = AttackConfig::tuned(q.kind(), AttackMethod::Beam);
        cfg.budget = self.budget;
        for (key, slot) in [("beam", &mut cfg.beam), ("budget", &mut cfg.budget)] {
            match request.get(key) {
                None => {}
                Some(v) => match v.as_u64() {
                    Some(n) => *slot = n as usize,
                    None => return Ok(fail(code::MALFORMED, format!("\"{key}\" must be a non-negative integer"))),
                },
            }
        }
        let result = match request.get("edge_scores") {
            Some(table) => {
                let Some(mut policy) = TablePolicy::parse(table) else {
                    return Ok(fail(code::MALFORMED, "edge_scores must be a list of [a1, a2, score]"));
                };
                attack_beam(&mut policy, self.solver, q, &cfg)
            }
            None => {
                let mut policy = RemotePolicy { reader, writer, io_error: None };
                let r = attack_beam(&mut policy, self.solver, q, &cfg);
                if let Some(e) = policy.io_error {
                    return Err(e);
                }
                r
            }
        };
        Ok(match result {
            Ok(r) => {
                let trace: Vec<Value> = r.trace.iter().map(|s| json!([s.action.a1, s.action.a2, s.cost])).collect();
                Ok(json!({
                    "instance": index,
                    "beam": cfg.beam,
                    "budget": cfg.budget,
                    "clean_cost": r.clean_cost,
                    "best_cost": r.best_cost,
                    "gain": r.gain,
                    "evaluations": r.evaluations,
                    "trace": trace,
                }))
            }
            Err(corobust_core::attack::AttackError::Policy(e)) => fail(code::POLICY, e.0),
            Err(e) => fail(code::SOLVER, e.to_string()),
        })
    }
}

fn error_json(op: Option<&str>, code: &str, message: &str) -> Value {
    json!({ "ok": false, "op": op, "error": { "code": code, "message": message } })
}

struct TablePolicy(BTreeMap<(usize, usize), f64>);

impl TablePolicy {
    fn parse(v: &Value) -> Option<Self> {
        let mut map = BTreeMap::new();
        for row in v.as_array()? {
            let row = row.as_array()?;
            if row.len() != 3 {
                return None;
            }
            map.insert((row[0].as_u64()? as usize, row[1].as_u64()? as usize), row[2].as_f64()?);
        }
        Some(TablePolicy(map))
    }
}

impl Policy for TablePolicy {
    fn score(&mut self, _state: &Instance, candidates: &[AttackAction]) -> Result<Vec<f64>, PolicyError> {
        Ok(candidates.iter().map(|c| self.0.get(&(c.a1, c.a2)).copied().unwrap_or(0.0)).collect())
    }
}

/// Asks the client to score each expanded state.
struct RemotePolicy<'r, R, W> {
    reader: &'r mut R,
    writer: &'r mut W,
    io_error: Option<io::Error>,
}

impl<R: BufRead, W: Write> RemotePolicy<'_, R, W> {
    fn exchange(&mut self, state: &Instance, candidates: &[AttackAction]) -> io::Result<String> {
        let request = json!({ "op": "score_request", "state": state_json(state), "candidates": pairs(candidates) });
        writeln!(self.writer, "{request}")?;
        self.writer.flush()?;
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "client closed during eval_beam"));
        }
        Ok(line)
    }
}

impl<R: BufRead, W: Write> Policy for RemotePolicy<'_, R, W> {
    fn score(&mut self, state: &Instance, candidates: &[AttackAction]) -> Result<Vec<f64>, PolicyError> {
        let line = match self.exchange(state, candidates) {
            Ok(l) => l,
            Err(e) => {
                let msg = e.to_string();
                self.io_error = Some(e);
                return Err(PolicyError(msg));
            }
        };
        let reply: Value = serde_json::from_str(&line).map_err(|e| PolicyError(format!("bad scores line: {e}")))?;
        if reply.get("op").and_then(Value::as_str) != Some("scores") {
            return Err(PolicyError("expected {\"op\":\"scores\",...}".into()));
        }
        reply
            .get("scores")
            .and_then(Value::as_array)
            .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>())
            .ok_or_else(|| PolicyError("\"scores\" must be a list of numbers".into()))
    }
}

/// Serves each TCP connection on its own thread with its own session.
pub fn serve_tcp<S, A>(addr: A, solver: Arc<S>, instances: Arc<Vec<(String, Instance)>>, budget: usize) -> io::Result<()>
where
    S: Solver + Send + Sync + 'static,
    A: ToSocketAddrs,
{
    let listener = TcpListener::bind(addr)?;
    eprintln!("listening on {}", listener.local_addr()?);
    for stream in listener.incoming() {
        let stream = stream?;
        let (solver, instances) = (Arc::clone(&solver), Arc::clone(&instances));
        std::thread::spawn(move || {
            let reader = io::BufReader::new(stream.try_clone()?);
            Session::new(solver.as_ref(), &instances, budget).run(reader, stream)
        });
    }
    Ok(())
}
