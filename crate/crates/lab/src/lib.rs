//! Experiment runner for `gdnls-core`: flat key/value configs, validated
//! plans, CSV tables with JSON manifests, and ordered parallel sweeps.

pub mod config;
pub mod experiments;
pub mod output;
pub mod runner;

pub use config::{ConfigError, Experiment, ExperimentConfig, Key};
pub use output::{ResultRecord, Table};
pub use runner::{run, sweep, RunError};
