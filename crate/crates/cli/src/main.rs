//! `consbandit`: run conservative bandit experiments from JSON configs or
//! built-in presets and write per-run and summary CSVs.

mod commands;
mod config;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input; exit code 1.
    #[error("{0}")]
    Config(String),
    /// Failure while running or writing results; exit code 2.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<consbandit::Error> for CliError {
    fn from(e: consbandit::Error) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "consbandit", version, about = "Conservative bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Source {
    /// JSON experiment config.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in config (see `presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Override a config key, e.g. `--set replications=100`. Values are JSON,
    /// or plain strings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment exactly as configured.
    Run(Source),
    /// Run over a grid of alpha values.
    SweepAlpha {
        #[command(flatten)]
        source: Source,
        /// `start:end:step`; defaults to 0.01 plus 0.05:1:0.05.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Run over a list of horizons.
    SweepHorizon {
        #[command(flatten)]
        source: Source,
        /// Comma-separated horizons; defaults to 100 through 100000.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Join a finished run's summary with the lower-bound reference.
    Report {
        /// Directory written by `run` or a sweep.
        #[arg(long = "in")]
        input: PathBuf,
        /// Where to write the report CSV (default: `<in>/report.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List presets, or print one as JSON.
    Presets { name: Option<String> },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(source) => commands::run(&source, None),
        Command::SweepAlpha { source, grid } => commands::sweep_alpha(&source, grid.as_deref()),
        Command::SweepHorizon { source, grid } => commands::sweep_horizon(&source, grid.as_deref()),
        Command::Report { input, out } => commands::report(&input, out.as_deref()),
        Command::Presets { name } => commands::presets(name.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
