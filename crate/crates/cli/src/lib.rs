//! Config-driven experiment runner for `hybridnet-core`.
//!
//! Each subcommand reads an [`ExperimentConfig`], writes its data files to
//! the configured output directory and returns a JSON summary. Data files
//! are byte-identical across runs with the same config and seed; wall-clock
//! times only go to `run_manifest.json`.

pub mod commands;
pub mod config;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

pub use config::{ExperimentConfig, Overrides};

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Runtime(#[from] hybridnet_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Simulate,
    Meanfield,
    Analyze,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Simulate => "simulate",
            Command::Meanfield => "meanfield",
            Command::Analyze => "analyze",
            Command::Compare => "compare",
        }
    }
}

fn unix_seconds() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Runs `command` and writes `run_manifest.json` next to its outputs.
pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let started = unix_seconds();
    let summary = match command {
        Command::Generate => serde_json::to_value(commands::generate(cfg)?),
        Command::Simulate => serde_json::to_value(commands::simulate(cfg)?),
        Command::Meanfield => serde_json::to_value(commands::meanfield(cfg)?),
        Command::Analyze => serde_json::to_value(commands::analyze(cfg)?),
        Command::Compare => serde_json::to_value(commands::compare(cfg)?),
    }
    .map_err(hybridnet_core::Error::from)?;
    let manifest = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "started_unix": started,
        "finished_unix": unix_seconds(),
        "config": cfg,
    });
    commands::write_json(&cfg.output_dir.join("run_manifest.json"), &manifest)?;
    Ok(summary)
}
