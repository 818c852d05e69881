//! `ptgraph`: matrices, spectra, exceptional points, island boundaries,
//! metrics and figure datasets for the non-Hermitian loop and chain models.
//!
//! Exit codes: 0 success, 2 configuration error, 3 bracket or search
//! failure, 4 physical refusal (complex spectrum, exceptional point, no
//! positive definite metric).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptgraph_core::Error;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const CONFIG: u8 = 2;
    pub const SEARCH: u8 = 3;
    pub const REFUSAL: u8 = 4;

    pub fn config(message: impl Into<String>) -> Self {
        Self { code: Self::CONFIG, message: message.into() }
    }

    pub fn refusal(message: impl Into<String>) -> Self {
        Self { code: Self::REFUSAL, message: message.into() }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidBracket { .. }
        | Error::NoBoundaryPoint(_)
        | Error::RootsNoConvergence(_)
        | Error::QrNoConvergence(_) => CliError::SEARCH,
        Error::ComplexSpectrum { .. } | Error::Defective { .. } | Error::NotPositiveDefinite => CliError::REFUSAL,
        Error::ScanPoint { source, .. } => exit_code(source),
        _ => CliError::CONFIG,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self { code: exit_code(&e), message: e.to_string() }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ptgraph",
    version,
    about = "Spectra and metrics of non-Hermitian chain and loop-graph Hamiltonians",
    after_help = "Settings resolve as: command-line flag, then the --config JSON file, then the built-in default.\n\
                  Exit codes: 0 success, 2 configuration error, 3 bracket/search failure, 4 physical refusal."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// JSON file with default settings for the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Bisection width for `ep`, residual bound for `metric`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Suppress reports on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Chain,
    Loop,
}

#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Half-chain size or wedge length.
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a Hamiltonian as CSV.
    Build(ModelArgs),
    /// Spectrum of the K = 3 loop along a z grid.
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        /// Grid as start:stop:step, end point included.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Exceptional point inside a bracket (z for the loop, nu for a chain).
    Ep {
        #[arg(long, value_enum)]
        model: Option<Model>,
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        bracket: Option<Vec<f64>>,
    },
    /// Parametric boundary of the strong-coupling island.
    Boundary {
        /// Number of y values on [-(1+sqrt 5)/2, -1], endpoints included.
        #[arg(long)]
        samples: Option<usize>,
        /// Check each sample against the numerical spectrum.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long, value_enum)]
        branch: Option<BranchChoice>,
    },
    /// Metric operator as CSV; validity report as JSON.
    Metric {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated positive weights, one per eigenvalue (ascending).
        #[arg(long)]
        weights: Option<String>,
        /// Write the validity report here instead of stderr.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Dataset behind one of the figures fig2 .. fig8.
    Figure {
        name: String,
        /// Size of the determinant shift for fig7 and fig8.
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BranchChoice {
    Plus,
    Minus,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
