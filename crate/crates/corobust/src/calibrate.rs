//! Machine-speed normalization of solver time limits.
//!
//! Speed is the reciprocal of the mean wall time of solving one fixed
//! instance `samples` times. A limit tuned on a reference machine with speed
//! `speed_base` becomes `uniform * speed_base / speed_now` here.

use std::time::Instant;

use corobust_core::{Instance, SolveError, Solver};
use serde::{Deserialize, Serialize};

use crate::dataset::{generate_instance, SizeSpec};

pub const CALIBRATION_SAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationProfile {
    /// Label of the calibration instance.
    pub instance: String,
    pub solver: String,
    pub samples: usize,
    /// Solves per second on the reference machine.
    pub speed_base: f64,
    /// Solves per second here.
    pub speed_now: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CalibrationError {
    #[error("calibration solve failed: {0}")]
    Solver(#[from] SolveError),
    #[error("speeds must be finite and > 0 (base {base}, now {now})")]
    Speed { base: f64, now: f64 },
    #[error("at least one sample is required")]
    NoSamples,
}

/// The fixed calibration instance: a seeded max-cover instance of 100 sets
/// over 200 elements.
pub fn calibration_instance() -> (String, Instance) {
    let size = SizeSpec::Mc { sets: 100, elements: 200, k: None };
    (format!("{}-seed0", size.label()), generate_instance(&size, 0))
}

/// Solves per second, averaged over `samples` solves.
pub fn measure_speed<S: Solver + ?Sized>(solver: &S, instance: &Instance, samples: usize) -> Result<f64, CalibrationError> {
    if samples == 0 {
        return Err(CalibrationError::NoSamples);
    }
    let start = Instant::now();
    for _ in 0..samples {
        solver.solve(instance)?;
    }
    let mean = start.elapsed().as_secs_f64() / samples as f64;
    // Sub-nanosecond means only happen for trivial solvers; clamp so speed stays finite.
    Ok(1.0 / mean.max(1e-9))
}

/// Measures the current speed. Without a reference speed this machine becomes
/// the reference.
pub fn calibrate<S: Solver + ?Sized>(
    solver: &S,
    speed_base: Option<f64>,
    samples: usize,
) -> Result<CalibrationProfile, CalibrationError> {
    let (label, instance) = calibration_instance();
    let speed_now = measure_speed(solver, &instance, samples)?;
    let profile = CalibrationProfile {
        instance: label,
        solver: solver.name().to_string(),
        samples,
        speed_base: speed_base.unwrap_or(speed_now),
        speed_now,
    };
    profile.check()?;
    Ok(profile)
}

impl CalibrationProfile {
    pub fn check(&self) -> Result<(), CalibrationError> {
        let ok = |s: f64| s.is_finite() && s > 0.0;
        if ok(self.speed_base) && ok(self.speed_now) {
            Ok(())
        } else {
            Err(CalibrationError::Speed { base: self.speed_base, now: self.speed_now })
        }
    }
}

/// `(speed_base / speed_now) * uniform_limit`, in seconds.
pub fn scaled_limit(profile: &CalibrationProfile, uniform_limit: f64) -> f64 {
    profile.speed_base / profile.speed_now * uniform_limit
}
