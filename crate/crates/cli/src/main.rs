use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hybridnet_cli::{run, CliError, Command, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(
    name = "hybridnet",
    version,
    about = "Hybrid network generation and spreading experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the global seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the replica count of the propagation section.
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Build a network and write its edge list, node metadata and construction log.
    Generate,
    /// Run the spreading simulation and write the replica-averaged trace.
    Simulate,
    /// Integrate the mean-field equations and compute the threshold.
    Meanfield,
    /// Degree histogram, tail fit and head mass of a graph.
    Analyze,
    /// Rank mixtures by similarity to an external curve.
    Compare,
}

fn execute(cli: &Cli) -> Result<serde_json::Value, CliError> {
    let path = cli
        .common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(&Overrides {
        seed: cli.common.seed,
        output_dir: cli.common.out.clone(),
        replicas: cli.common.replicas,
    })?;
    let command = match cli.command {
        Sub::Generate => Command::Generate,
        Sub::Simulate => Command::Simulate,
        Sub::Meanfield => Command::Meanfield,
        Sub::Analyze => Command::Analyze,
        Sub::Compare => Command::Compare,
    };
    run(command, &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.common.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(&cli) {
        Ok(summary) => {
            if !cli.common.quiet {
                println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
