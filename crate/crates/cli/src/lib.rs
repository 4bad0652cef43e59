//! Experiment harness for the `sgs` command: configuration documents,
//! task runners and report emission.

pub mod config;
pub mod error;
pub mod output;
pub mod sources;
pub mod svg;
pub mod tasks;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
