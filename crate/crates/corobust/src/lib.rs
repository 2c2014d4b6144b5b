//! Everything around `corobust-core` that needs an operating system: the
//! instance file format, dataset generation, external solver processes, time
//! calibration, experiment grids, and the JSON-lines environment served to
//! learning agents.

pub mod bridge;
pub mod calibrate;
pub mod dataset;
pub mod experiment;
pub mod external;
pub mod format;
pub mod handle;

pub use corobust_core;
