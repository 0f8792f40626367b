//! `fstirap`: simulation, analytic optima, sweeps and pulse optimization for
//! dissipative fractional STIRAP entanglement.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Flags;
use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(fstirap_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and validation.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// RK4 step count, overriding the config.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Optimize the final angle as well.
    #[arg(long, global = true)]
    free_endpoint: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Closed-form optimal coefficients and concurrences (JSON).
    Analytic,
    /// Trajectory of the density matrix (CSV).
    Simulate,
    /// Optimized concurrence over a duration grid (CSV).
    Sweep,
    /// Numerical pulse optimization (JSON).
    Optimize,
    /// Master-equation invariant checks on random cases (JSON).
    Validate,
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if matches!(cli.command, Command::Validate) => RunConfig::default(),
        None => return Err(CliError::Config("--config is required".into())),
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let flags = Flags {
        steps: cli.steps,
        free_endpoint: cli.free_endpoint,
    };
    let (text, ok) = match cli.command {
        Command::Analytic => (commands::analytic(&cfg)?, true),
        Command::Simulate => (commands::simulate(&cfg, flags)?, true),
        Command::Sweep => (commands::sweep(&cfg, flags)?, true),
        Command::Optimize => (commands::optimize(&cfg, flags)?, true),
        Command::Validate => commands::validate(&cfg)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("invariant check failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("fstirap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
