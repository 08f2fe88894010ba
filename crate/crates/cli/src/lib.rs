//! Batch front end for the `duality-core` laboratory: scenario configs in,
//! CSV patterns and JSON reports out.

pub mod commands;
pub mod config;
pub mod error;
pub mod sweep;

pub use commands::{run_scenario, AnalysisReport, Options};
pub use config::{RankPolicy, Scenario, SweepConfig};
pub use error::CliError;
pub use sweep::{run_sweep, SweepResult};
