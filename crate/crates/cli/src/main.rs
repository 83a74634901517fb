use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonmarkov_core::measures::Variant;
use nonmarkov_core::tcl::TclOrder;

mod plot;
mod run;

/// Command outcome. Usage problems (bad flags, malformed inputs,
/// precondition violations) exit 1; failures of the numerics or of the
/// output stage exit 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

/// Reduced qubit dynamics beyond the rotating-wave approximation:
/// coefficient sweeps, divisibility/backflow measures, positivity
/// diagnostics and figure rendering.
#[derive(Parser)]
#[command(name = "nonmarkov", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep the generator coefficients over a time window (CSV)
    Coefficients(RunArgs),
    /// Divisibility and backflow measures with interval lists (CSV + JSON)
    Measures(RunArgs),
    /// Accumulated-rate positivity diagnostics (CSV)
    Positivity(RunArgs),
    /// Render CSVs from the other commands as SVG line plots
    Plot(plot::PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// bundled figure preset: 1a-1d (coefficients), 2a-2c and 3a-3c
    /// (measures), 4 (positivity)
    #[arg(long, value_name = "ID")]
    figure: Option<String>,
    /// plain `key = value` parameter file (gamma0, lambda, delta, omega0)
    #[arg(long, value_name = "PATH", conflicts_with = "figure")]
    config: Option<PathBuf>,
    /// perturbative order of the generator
    #[arg(long, default_value_t = TclOrder::Tcl4)]
    order: TclOrder,
    /// model variant for measure sweeps: full, secular or rwa
    #[arg(long)]
    variant: Option<Variant>,
    /// also emit the rotating-wave curves next to the chosen variant
    #[arg(long)]
    compare_rwa: bool,
    /// output directory for CSV/JSON artifacts
    #[arg(long, default_value = "out", value_name = "DIR")]
    out: PathBuf,
    /// number of grid points (uniform over [0, tmax])
    #[arg(long, value_name = "N", default_value_t = 400)]
    grid: usize,
    /// end of the time window; overrides the figure preset window
    #[arg(long, value_name = "T")]
    tmax: Option<f64>,
    /// interval-detection threshold override (measures only)
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here and must exit 0
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.cmd {
        Cmd::Coefficients(args) => run::coefficients(args),
        Cmd::Measures(args) => run::measures(args),
        Cmd::Positivity(args) => run::positivity(args),
        Cmd::Plot(args) => plot::render(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
