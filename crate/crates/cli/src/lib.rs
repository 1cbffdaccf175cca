//! Command-line front end: scenario configuration files, campaign execution,
//! and CSV/plot-data emission for the secrecy simulator.

use std::path::PathBuf;

use thiserror::Error;

pub mod config;
pub mod output;
pub mod runner;

pub use config::{parse_config, resolve, ConfigFile, RunManifest, SweepAxis};
pub use output::{emit_results, fmt9};
pub use runner::{execute, CampaignRow, RunOutcome};

/// Process exit codes: 0 success, 2 config error, 3 infeasible campaign,
/// 4 I/O error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config not found: {0}")]
    ConfigNotFound(PathBuf),
    #[error("invalid config: {detail}")]
    ConfigInvalid { detail: String },
    #[error("infeasible campaign: {0}")]
    Infeasible(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigNotFound(_) | CliError::ConfigInvalid { .. } => 2,
            CliError::Infeasible(_) => 3,
            CliError::Output(_) => 4,
        }
    }
}

/// Cap worker parallelism from `LUXSEC_THREADS` (absent or 0 means auto).
/// Must run before any parallel work; repeated calls are harmless.
pub fn init_thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LUXSEC_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| CliError::ConfigInvalid {
        detail: format!("LUXSEC_THREADS: must be a non-negative integer, got {raw:?}"),
    })?;
    if threads == 0 {
        return Ok(());
    }
    // A second build_global in the same process is reported as an error by
    // rayon; the pool already in place keeps its size, which is fine here.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}
