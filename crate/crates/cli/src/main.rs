//! `magbr`: command-line front end for the kernels, the discretised operator
//! and the verification harness.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use magbr::harness::{Family, JumpKind, Suite};

#[derive(Parser, Debug)]
#[command(name = "magbr", version, about = "Bochner-Riesz kernels and operators with an Aharonov-Bohm potential")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV tables and run manifests.
    #[arg(long, global = true, default_value = "magbr-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

/// Overrides for the `[kernel]` and `[flux]` sections.
#[derive(Args, Debug, Clone, Default)]
pub struct KernelArgs {
    /// Signed order of the multiplier.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Constant flux; replaces any profile from the config.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Absolute tolerance of the diffractive integral.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Overrides for the `[grid]` section.
#[derive(Args, Debug, Clone, Default)]
pub struct GridArgs {
    #[arg(long)]
    pub n_r: Option<usize>,
    /// Angular nodes (a power of two).
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Operator,
    Oracle,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Jump {
    Indicator,
    Constant,
}

impl From<Jump> for JumpKind {
    fn from(j: Jump) -> Self {
        match j {
            Jump::Indicator => JumpKind::Indicator,
            Jump::Constant => JumpKind::Constant,
        }
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: magbr::Error| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: magbr::Error| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the kernel at point pairs.
    KernelEval {
        #[command(flatten)]
        kernel: KernelArgs,
        /// First point in polar coordinates.
        #[arg(long, num_args = 2, value_names = ["R", "THETA"])]
        x: Option<Vec<f64>>,
        /// Second point in polar coordinates.
        #[arg(long, num_args = 2, value_names = ["R", "THETA"])]
        y: Option<Vec<f64>>,
        /// CSV with columns r1,theta1,r2,theta2.
        #[arg(long, conflicts_with_all = ["x", "y"])]
        pairs: Option<PathBuf>,
        /// Spectral measure kernel instead of the Bochner-Riesz kernel.
        #[arg(long)]
        spectral: bool,
    },
    /// Apply the operator to a function on the polar grid.
    Apply {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// CSV with columns r,theta,re,im at grid nodes; missing nodes are zero.
        #[arg(long, group = "source")]
        input: Option<PathBuf>,
        /// Indicator of a shape given as JSON, e.g. '{"kind":"ball","center":[0,0],"radius":2}'.
        #[arg(long, group = "source")]
        shape: Option<String>,
        /// Gaussian exp(-|x|^2 / (2 w^2)) of width w.
        #[arg(long, group = "source")]
        gaussian: Option<f64>,
        /// Compare with the free-space FFT oracle (zero flux only).
        #[arg(long)]
        oracle: bool,
    },
    /// Run verification suites; exits nonzero if any report fails.
    Verify {
        /// Suite name; repeat for several. Default: all.
        #[arg(long = "suite", value_parser = parse_suite)]
        suites: Vec<Suite>,
    },
    /// Ratios ||S chi_E||_q / ||chi_E||_p over dyadic families of sets.
    RatioSweep {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// The point (1/p, 1/q).
        #[arg(long, num_args = 2, value_names = ["INV_P", "INV_Q"], required = true)]
        point: Vec<f64>,
        /// Family name; repeat for several. Default: balls and unit annuli.
        #[arg(long = "family", value_parser = parse_family)]
        families: Vec<Family>,
        /// Comma-separated powers of two.
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "operator")]
        engine: Engine,
    },
    /// Fit the exponent of the ratio against lambda on co-scaled grids.
    ScalingFit {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, num_args = 2, value_names = ["INV_P", "INV_Q"], required = true)]
        point: Vec<f64>,
        /// Comma-separated values of lambda.
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        /// Shape at lambda = 1 as JSON. Default: the unit ball.
        #[arg(long)]
        shape: Option<String>,
    },
    /// Truncation of the angular jump in the model operator.
    Stability {
        #[arg(long)]
        lambda: Option<f64>,
        /// Comma-separated truncation orders.
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
        #[arg(long, value_enum)]
        jump: Option<Jump>,
    },
    /// Classify a point against the boundedness region.
    Region {
        /// Order in the positive convention, in (0, 3/2).
        #[arg(long)]
        delta: f64,
        #[arg(long, num_args = 2, value_names = ["INV_P", "INV_Q"], required = true)]
        point: Vec<f64>,
    },
    /// Tabulate J_nu with error estimates.
    BesselTable {
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0.5,1")]
        nu: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        r_min: f64,
        #[arg(long, default_value_t = 50.0)]
        r_max: f64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Geometric instead of uniform spacing.
        #[arg(long)]
        log: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
