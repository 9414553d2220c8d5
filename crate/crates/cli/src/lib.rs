//! Command-line front end for `eclimb-core`: scenario files, profile and
//! summary output, cost sweeps and CI ceiling calibration.

pub mod app;
pub mod config;
pub mod error;
pub mod format;
pub mod output;

pub use config::ScenarioConfig;
pub use error::CliError;
