//! `cojump` command-line front end.
//!
//! Exit status: 0 success, 2 malformed input, 3 validation failure,
//! 4 degenerate statistics (only with `--strict`), 1 anything else.

mod commands;
mod failure;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use failure::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "cojump",
    version,
    about = "Threshold estimation of integrated covariation and co-jumps"
)]
struct Cli {
    /// Worker threads for Monte Carlo commands (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Exit with status 4 when a statistic is degenerate or undefined.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate covariation statistics from two `time,value` CSV files.
    Estimate(EstimateArgs),
    /// Simulate one bivariate path and export it.
    Simulate(SimulateArgs),
    /// Monte Carlo bias study at one threshold.
    Mc(McArgs),
    /// Mean bias over a grid of thresholds, with common random numbers.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Threshold constant in `r_h = c h^beta`.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    c: f64,
    /// Threshold exponent in `r_h = c h^beta`, in (0, 1).
    #[arg(long, default_value_t = 0.99, allow_negative_numbers = true)]
    beta: f64,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    file1: PathBuf,
    file2: PathBuf,
    #[command(flatten)]
    threshold: ThresholdArgs,
    /// Allow different observation grids (overlap estimator).
    #[arg(long = "async")]
    asynchronous: bool,
    /// Only use observations up to this time.
    #[arg(long, allow_negative_numbers = true)]
    upto: Option<f64>,
    /// Write `estimates.json` and a manifest here instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model config file (key = value with section headers).
    #[arg(long, conflicts_with = "model")]
    config: Option<PathBuf>,
    /// Built-in default model when no config file is given.
    #[arg(long, value_parser = ["model1", "model2"])]
    model: Option<String>,
    /// Jump intensity of J1 (per day).
    #[arg(long, allow_negative_numbers = true)]
    lambda1: Option<f64>,
    /// Jump intensity of J3 (per day).
    #[arg(long, allow_negative_numbers = true)]
    lambda3: Option<f64>,
    /// Brownian correlation.
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Jump correlation.
    #[arg(long = "rho-j", allow_negative_numbers = true)]
    rho_j: Option<f64>,
    /// Any other config key, e.g. `--set days=2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// Master seed; falls back to $COJUMP_SEED.
    #[arg(long, env = "COJUMP_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Path index within the seed's stream family.
    #[arg(long, default_value_t = 0)]
    path_index: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct McArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    threshold: ThresholdArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Number of simulated paths.
    #[arg(long, default_value_t = cojump::experiments::DEFAULT_PATHS)]
    paths: usize,
    /// Use 3000 paths.
    #[arg(long, conflicts_with = "paths")]
    full_scale: bool,
    /// Number of normal QQ pairs to export.
    #[arg(long, default_value_t = 99)]
    qq_points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Paths per cell (shared by all cells).
    #[arg(long, default_value_t = 300)]
    paths: usize,
    /// Comma-separated c values (default 0.1, 0.6, ..., 5.6).
    #[arg(long, value_delimiter = ',')]
    cs: Option<Vec<f64>>,
    /// Comma-separated beta values (default 0.05, 0.10, ..., 0.90, 0.99).
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let strict = cli.strict;
    let pool = match cli.threads {
        Some(0) => return Err(Failure::invalid("--threads must be at least 1")),
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Other(e.into()))?,
        ),
        None => None,
    };
    let go = || match cli.command {
        Command::Estimate(a) => commands::estimate(a, strict),
        Command::Simulate(a) => commands::simulate(a),
        Command::Mc(a) => commands::mc(a, strict),
        Command::Sweep(a) => commands::sweep(a),
    };
    match pool {
        Some(p) => p.install(go),
        None => go(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
