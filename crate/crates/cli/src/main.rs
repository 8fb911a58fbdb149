//! `cascade-stab`: synthesize, simulate, verify and reproduce stabilizing
//! controllers for cascade reaction-diffusion systems.
//!
//! Exit status is 0 when every certification check passed, 1 when a check
//! failed and 2 on any error.

mod config;
mod output;
mod repro;
mod run;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use cascade_core::linalg::LinalgError;
use cascade_core::Integrator;
use clap::{Parser, Subcommand};
use thiserror::Error;

use config::RunConfig;
use run::Overrides;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Core(#[from] cascade_core::Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Parser)]
#[command(name = "cascade-stab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Design the controller, certify it and export it as JSON.
    Synthesize(Flags),
    /// Design, certify and simulate; writes CSV and SVG artifacts.
    Simulate(Flags),
    /// Full property report for the configured design.
    Verify(Flags),
    /// Run both reference examples and print the acceptance table.
    Repro(Flags),
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's "out".
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of retained modes in the closed-loop simulation.
    #[arg(long = "n-sim")]
    n_sim: Option<usize>,
    #[arg(long, value_parser = ["expm", "rk4"])]
    integrator: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Result<Overrides, CliError> {
        Ok(Overrides {
            out: self.out.clone(),
            seed: self.seed,
            n_sim: self.n_sim,
            integrator: self
                .integrator
                .as_deref()
                .map(str::parse::<Integrator>)
                .transpose()?,
        })
    }

    fn load(&self) -> Result<RunConfig, CliError> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
        RunConfig::load(path)
    }
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Synthesize(f) => run::synthesize(&f.load()?, &f.overrides()?),
        Command::Simulate(f) => run::simulate(&f.load()?, &f.overrides()?),
        Command::Verify(f) => run::verify(&f.load()?, &f.overrides()?),
        Command::Repro(f) => {
            if f.config.is_some() {
                log::info!("repro uses the embedded reference configs; --config is ignored");
            }
            repro::repro(f.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
