//! Command-line driver: simulate data, fit the model roster, forecast the
//! held-out window and write diagnostic tables.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_fit, cmd_forecast, cmd_report, derive_seed, Workspace};
pub use config::{Overrides, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "regimes", version, about = "Bayesian regime-switching regressions for return series")]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated model abbreviations, e.g. NHHM_4,HHM_2,RW.
    #[arg(long, global = true, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Number of held-out one-step-ahead forecasts.
    #[arg(long, global = true)]
    pub horizons: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset with a manifest and run config.
    Simulate {
        /// nhhm or hhm.
        #[arg(long, default_value = "nhhm")]
        kind: String,
        /// Number of aligned rows.
        #[arg(long, default_value_t = 430)]
        length: usize,
    },
    /// Fit every roster model on the training window.
    Fit,
    /// Score one-step-ahead forecasts over the held-out window.
    Forecast,
    /// Coverage, state summaries and plot data.
    Report,
    /// Fit, forecast and report in one go.
    Run,
}

fn workspace(cli: &Cli) -> Result<Workspace, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::new(error::code::USAGE, "--config is required"))?;
    let over = Overrides {
        seed: cli.seed,
        models: cli.models.clone(),
        out: cli.out.clone(),
        horizons: cli.horizons,
    };
    Workspace::open(RunConfig::load(path, &over)?)
}

/// Execute a parsed command line, returning what to print on success.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Simulate { kind, length } => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let seed = cli.seed.unwrap_or(0);
            let manifest = commands::simulate(&out, kind, *length, seed)?;
            let cfg = format!(
                "manifest = \"manifest.toml\"\nhorizons = {}\nout = \"out\"\n\n[mcmc]\niterations = 20000\nburn_in = 10000\nthin = 5\nseed = {seed}\n",
                cli.horizons.unwrap_or(30)
            );
            output::write_atomic(&out.join("run.toml"), cfg.as_bytes())?;
            Ok(format!("wrote {}", manifest.display()))
        }
        Command::Fit => Ok(cmd_fit(&workspace(cli)?)?.join("\n")),
        Command::Forecast => cmd_forecast(&workspace(cli)?),
        Command::Report => cmd_report(&workspace(cli)?),
        Command::Run => {
            let ws = workspace(cli)?;
            let mut out = cmd_fit(&ws)?.join("\n");
            out.push_str("\n\n");
            out.push_str(&cmd_forecast(&ws)?);
            out.push('\n');
            out.push_str(&cmd_report(&ws)?);
            Ok(out)
        }
    }
}
