//! Named solvers: builtin heuristics or external executables.

use std::path::PathBuf;
use std::time::Duration;

use corobust_core::{Heuristic, Instance, ProblemKind, Solution, SolveError, Solver};

use crate::external::{ExternalSolver, Protocol};

/// Executable for `atsp-external` when no path is given in the name.
pub const ATSP_EXE_VAR: &str = "COROBUST_ATSP_EXE";
/// Executable for `milp-external` when no path is given in the name.
pub const MILP_EXE_VAR: &str = "COROBUST_MILP_EXE";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HandleKind {
    Builtin,
    ExternalSubprocess,
}

#[derive(Debug)]
enum Backend {
    Builtin(Heuristic),
    External(ExternalSolver),
}

#[derive(Debug)]
pub struct SolverHandle {
    name: String,
    backend: Backend,
}

#[derive(Debug, thiserror::Error)]
pub enum HandleError {
    #[error("unknown solver {0:?}")]
    Unknown(String),
    #[error("{name}: set {var} or pass `{name}=PATH`")]
    MissingExecutable { name: String, var: &'static str },
}

impl SolverHandle {
    pub fn builtin(h: Heuristic) -> Self {
        SolverHandle { name: h.as_str().to_string(), backend: Backend::Builtin(h) }
    }

    pub fn external(name: impl Into<String>, solver: ExternalSolver) -> Self {
        SolverHandle { name: name.into(), backend: Backend::External(solver) }
    }

    /// Resolves a builtin heuristic name, `atsp-external[=PATH]` or
    /// `milp-external[=PATH]`. `time_limit` only applies to external solvers.
    pub fn resolve(spec: &str, time_limit: Option<Duration>) -> Result<Self, HandleError> {
        if let Ok(h) = spec.parse::<Heuristic>() {
            return Ok(Self::builtin(h));
        }
        let (name, path) = match spec.split_once('=') {
            Some((n, p)) => (n, Some(PathBuf::from(p))),
            None => (spec, None),
        };
        let (protocol, var) = match name {
            "atsp-external" => (Protocol::AtspMatrix, ATSP_EXE_VAR),
            "milp-external" => (Protocol::Milp, MILP_EXE_VAR),
            _ => return Err(HandleError::Unknown(spec.to_string())),
        };
        let exe = path
            .or_else(|| std::env::var_os(var).map(PathBuf::from))
            .ok_or(HandleError::MissingExecutable { name: name.to_string(), var })?;
        Ok(Self::external(name, ExternalSolver::new(exe, protocol, time_limit)))
    }

    pub fn kind(&self) -> HandleKind {
        match self.backend {
            Backend::Builtin(_) => HandleKind::Builtin,
            Backend::External(_) => HandleKind::ExternalSubprocess,
        }
    }

    /// Builtins are pure functions of the instance; external solvers may not be.
    pub fn deterministic(&self) -> bool {
        self.kind() == HandleKind::Builtin
    }

    pub fn time_limit(&self) -> Option<Duration> {
        match &self.backend {
            Backend::Builtin(_) => None,
            Backend::External(e) => e.time_limit,
        }
    }

    pub fn supports(&self, kind: ProblemKind) -> bool {
        match &self.backend {
            Backend::Builtin(h) => h.supports(kind),
            Backend::External(e) => e.protocol.supports(kind),
        }
    }

    pub fn last_wall_time(&self) -> Option<Duration> {
        match &self.backend {
            Backend::Builtin(_) => None,
            Backend::External(e) => e.last_wall_time(),
        }
    }
}

impl Solver for SolverHandle {
    fn name(&self) -> &str {
        &self.name
    }

    fn solve(&self, instance: &Instance) -> Result<Solution, SolveError> {
        match &self.backend {
            Backend::Builtin(h) => h.solve(instance),
            Backend::External(e) => e.solve(instance),
        }
    }
}
