//! `fracgp`: simulate, tabulate, estimate and verify fractional Gaussian processes.
//!
//! Failures print one line `error[<tag>]: <message>` to stderr and exit with
//! the code of [`Failure`].

mod commands;
mod spec_args;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spec_args::{GridArgs, SpecArgs};

#[derive(Debug, Parser)]
#[command(name = "fracgp", version, about = "Fractional and multifractional Gaussian processes")]
struct Cli {
    /// Worker threads for ensembles and lattices (0 = one per core).
    #[arg(long, global = true, env = "FRACGP_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write sample paths as `t,value` CSV plus a metadata sidecar.
    Simulate(SimulateArgs),
    /// Write the covariance matrix of a spec on the grid.
    Covariance(CovarianceArgs),
    /// Estimate regularity or memory from a path CSV.
    Estimate(EstimateArgs),
    /// Compare closed-form kernels against the quadrature oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    /// auto, cholesky or circulant.
    #[arg(long, default_value = "auto")]
    method: String,
    #[arg(long, default_value = ".")]
    out_dir: std::path::PathBuf,
}

#[derive(Debug, Args)]
pub struct CovarianceArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output file, `-` for stdout.
    #[arg(long, default_value = "covariance.csv")]
    output: String,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Path CSV with header `t,value`.
    #[arg(long)]
    input: std::path::PathBuf,
    /// hurst, holder or lrd.
    #[arg(long, default_value = "hurst")]
    estimator: String,
    /// Comma-separated lags for `hurst` (default: powers of two up to n/8).
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<usize>>,
    /// Window length for `holder`.
    #[arg(long, default_value_t = 128)]
    window: usize,
    /// Share of Fourier frequencies used by `lrd`.
    #[arg(long, default_value_t = fracgp::estimators::DEFAULT_LOW_FREQ_FRACTION)]
    low_freq_fraction: f64,
    /// Difference the path before `lrd` (for processes with stationary increments).
    #[arg(long)]
    difference: bool,
    /// Output file, `-` for stdout.
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random lattice over one kernel family; without it the spec flags
    /// select fixed parameters checked on all grid pairs.
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Random lattice points per family.
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Multiply the closed form by 1 + EPS (negative control).
    #[arg(long, default_value_t = 0.0)]
    perturb: f64,
    /// Use the kernel as typeset, without the exponent corrections (rl-mbm, rl-mou).
    #[arg(long)]
    printed: bool,
    /// Build the oracle with a growing exponential memory factor.
    #[arg(long)]
    growing_drift: bool,
    /// Output file, `-` for stdout.
    #[arg(long, default_value = "verify.json")]
    output: String,
}

/// A failure with its exit code and machine-readable tag.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub tag: String,
    pub message: String,
}

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SAMPLER: u8 = 3;
pub const EXIT_KERNEL: u8 = 4;
pub const EXIT_ESTIMATE: u8 = 5;
pub const EXIT_DISAGREEMENT: u8 = 6;
pub const EXIT_IO: u8 = 1;

impl Failure {
    pub fn new(code: u8, tag: &str, message: impl Into<String>) -> Self {
        Self { code, tag: tag.into(), message: message.into() }
    }

    pub fn from_core(code: u8, e: fracgp::error::Error) -> Self {
        Self::new(code, e.tag(), e.to_string())
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, "usage", message)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error[usage]: {first}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if cli.threads > 0 {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let result = match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Covariance(a) => commands::covariance(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let message = f.message.replace('\n', " ");
            eprintln!("error[{}]: {message}", f.tag);
            ExitCode::from(f.code)
        }
    }
}
