//! Running configs: single runs, ordered parallel sweeps, exit codes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use gdnls_core::probes::DEFAULT_SEED;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, Key};
use crate::experiments::Plan;
use crate::output::{config_hash, ResultRecord, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),

    #[error("numerical failure: {0}")]
    Numerical(gdnls_core::Error),

    #[error("cannot write outputs: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Numerical(_) => EXIT_NUMERICAL,
            RunError::Config(_) | RunError::Io(_) => EXIT_VALIDATION,
        }
    }
}

/// Validate, execute and stamp one config.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultRecord, RunError> {
    let start = Instant::now();
    let plan = Plan::from_config(cfg)?;
    let outcome = plan
        .execute(cfg.int(Key::Seed, DEFAULT_SEED))
        .map_err(|e| {
            if e.is_validation() {
                // reachable only where a precondition depends on the evolved state
                RunError::Config(ConfigError::field(cfg.experiment.name(), e.to_string()))
            } else {
                RunError::Numerical(e)
            }
        })?;
    Ok(ResultRecord {
        experiment: cfg.experiment.name().to_string(),
        config: cfg.clone(),
        config_hash: config_hash(cfg),
        version: VERSION,
        timestamp: chrono::Utc::now().to_rfc3339(),
        wall_time: start.elapsed().as_secs_f64(),
        tables: outcome.tables,
        summary: outcome.summary,
        checks: outcome.checks,
    })
}

/// Run configs on a pool of `workers` threads. Results come back in input
/// order; a failing run does not affect its siblings. With one worker the
/// probes inside each run are single-threaded too.
pub fn sweep(configs: &[ExperimentConfig], workers: usize) -> Vec<Result<ResultRecord, RunError>> {
    if configs.is_empty() {
        return Vec::new();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| configs.par_iter().map(run).collect())
}

/// Output stem of a run: `output_path` when set, otherwise the experiment
/// name (with the sweep index when several runs share a directory).
pub fn output_stem(cfg: &ExperimentConfig, out_dir: &Path, index: Option<usize>) -> PathBuf {
    let name = match cfg.get(Key::OutputPath) {
        Some(v) => v.to_string(),
        None => match index {
            Some(i) => format!("{}-{i:03}", cfg.experiment),
            None => cfg.experiment.name().to_string(),
        },
    };
    out_dir.join(name)
}

/// Exit code for a batch: 0 when every run succeeded, otherwise 3 if any
/// run failed numerically and 2 for validation-only failures.
pub fn batch_exit_code<T>(results: &[Result<T, RunError>]) -> i32 {
    results
        .iter()
        .filter_map(|r| r.as_ref().err())
        .map(RunError::exit_code)
        .max()
        .unwrap_or(EXIT_OK)
}

/// Expand `key=v1,v2,...` into one config per value.
pub fn vary(base: &ExperimentConfig, spec: &str) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let (k, values) = spec
        .split_once('=')
        .ok_or_else(|| ConfigError::field(spec, "expected key=v1,v2,..."))?;
    let key: Key = k
        .trim()
        .parse()
        .map_err(|m| ConfigError::field(k.trim(), m))?;
    values
        .split(',')
        .map(|v| {
            let mut cfg = base.clone();
            cfg.set_raw(key, v)?;
            Ok(cfg)
        })
        .collect()
}
