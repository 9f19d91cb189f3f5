//! `neurochaos` — experiment harness for chaotic-map feature extraction
//! and classification.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

mod commands;
mod config;
mod experiment;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use commands::{LyapunovParams, MapKind};
use config::Overrides;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration; exits 2 before any file is written.
    Usage(String),
    /// Failure while running a valid experiment; exits 1.
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

#[derive(Parser)]
#[command(
    name = "neurochaos",
    version,
    about = "Chaotic-map feature extraction and classification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grid-search q, b, epsilon with stratified cross-validation
    Tune(ConfigArgs),
    /// Train and evaluate one configuration across consecutive seeds
    Eval(ConfigArgs),
    /// Evaluate every requested architecture x classifier combination
    Sweep(ConfigArgs),
    /// Mean macro-F1 versus training-set size, averaged over trials
    Lowsample(ConfigArgs),
    /// Lyapunov exponent across a map-parameter range
    Lyapunov(LyapunovArgs),
    /// Write per-neuron feature CSVs for external classifiers
    ExportFeatures(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment configuration file (.json or .toml)
    #[arg(long)]
    config: PathBuf,
    /// Base RNG seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds to run (overrides the config)
    #[arg(long)]
    seeds: Option<usize>,
    /// Trace iteration cap (overrides the config)
    #[arg(long)]
    cap: Option<usize>,
    /// Output directory (overrides the config)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn settings(&self) -> Result<config::Settings, CliError> {
        config::load(
            &self.config,
            Overrides {
                seed: self.seed,
                seeds: self.seeds,
                cap: self.cap,
            },
            self.out.as_deref(),
        )
    }
}

#[derive(Args)]
struct LyapunovArgs {
    /// Map family to sweep
    #[arg(long, value_enum)]
    map: MapKind,
    /// Range start (default: 3.5 for logistic, 0.1 for skew-tent)
    #[arg(long)]
    from: Option<f64>,
    /// Range end (default: 4.0 for logistic, 0.9 for skew-tent)
    #[arg(long)]
    to: Option<f64>,
    /// Number of evenly spaced parameter values
    #[arg(long, default_value_t = 51)]
    steps: usize,
    /// Initial state of the trajectory
    #[arg(long, default_value_t = 0.01)]
    x0: f64,
    /// Post-burn-in iterations averaged per parameter value
    #[arg(long, default_value_t = 100_000)]
    iterations: usize,
    /// Iterations discarded before averaging
    #[arg(long, default_value_t = 1_000)]
    burn_in: usize,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl LyapunovArgs {
    fn params(&self) -> LyapunovParams {
        let (from, to) = match self.map {
            MapKind::Logistic => (3.5, 4.0),
            MapKind::SkewTent => (0.1, 0.9),
        };
        LyapunovParams {
            map: self.map,
            from: self.from.unwrap_or(from),
            to: self.to.unwrap_or(to),
            steps: self.steps,
            x0: self.x0,
            iterations: self.iterations,
            burn_in: self.burn_in,
            out: self.out.clone(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Tune(args) => commands::tune(&args.settings()?),
        Command::Eval(args) => commands::eval(&args.settings()?),
        Command::Sweep(args) => commands::sweep(&args.settings()?),
        Command::Lowsample(args) => commands::lowsample(&args.settings()?),
        Command::Lyapunov(args) => commands::lyapunov_sweep(&args.params()),
        Command::ExportFeatures(args) => commands::export_features(&args.settings()?),
    }
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        match e {
            CliError::Usage(msg) => {
                eprintln!("error: {msg}");
                std::process::exit(2);
            }
            CliError::Runtime(err) => {
                eprintln!("error: {err:#}");
                std::process::exit(1);
            }
        }
    }
}
