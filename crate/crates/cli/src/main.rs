//! `trilinear`: coherent-state data for the trilinear boson Hamiltonian.
//!
//! Every command writes a CSV file whose first line is a `#` comment with
//! the full configuration. Output goes to the current directory unless
//! `TRILINEAR_OUT_DIR` is set; `--out -` writes to stdout.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical or tolerance failure.

mod commands;
mod output;
mod parse;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trilinear::{BargmannIndex, Complex64};

use parse::{parse_complex, parse_k, Spacing};

#[derive(Parser)]
#[command(name = "trilinear", version, about = "Coherent states of the trilinear boson Hamiltonian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitudes and pump photon distribution of one coherent state.
    State(StateArgs),
    /// Data behind the purity, photon-distribution and number-statistics plots.
    Figure(FigureArgs),
    /// Numerical checks of the identity, eigenvalue equations, ODEs and
    /// differential operators.
    Verify(VerifyArgs),
    /// Exact evolution of |L⟩|k,0⟩.
    Evolve(EvolveArgs),
    /// Energy-transfer efficiency from |L⟩|k,0⟩.
    Efficiency(EfficiencyArgs),
}

#[derive(Args)]
struct StateArgs {
    /// Bargmann index, an integer or p/q.
    #[arg(long, value_parser = parse_k)]
    k: BargmannIndex,
    #[arg(long = "L")]
    l: usize,
    /// Complex z, e.g. 0.5, 2i or 0.3-0.1i.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Complex64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    Purity,
    PhotonDist,
    NumberStats,
}

#[derive(Args)]
struct FigureArgs {
    which: Figure,
    #[arg(long, value_parser = parse_k)]
    k: BargmannIndex,
    /// One L, or a comma list for the purity figure.
    #[arg(long = "L", value_delimiter = ',', required = true)]
    l: Vec<usize>,
    /// Explicit |z| values (comma list); overrides the grid.
    #[arg(long, value_delimiter = ',')]
    z: Vec<f64>,
    /// Defaults to z-max/steps for linear spacing.
    #[arg(long)]
    z_min: Option<f64>,
    #[arg(long, default_value_t = 5.0)]
    z_max: f64,
    #[arg(long, default_value_t = 500)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    spacing: Spacing,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_k)]
    k: BargmannIndex,
    #[arg(long = "L", value_delimiter = ',', required = true)]
    l: Vec<usize>,
    /// Replaces every per-check tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct CouplingArgs {
    /// |κ|.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// arg κ; the default π/2 gives κ = i|κ|.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
    kappa_phase: f64,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long, value_parser = parse_k)]
    k: BargmannIndex,
    #[arg(long = "L")]
    l: usize,
    #[command(flatten)]
    coupling: CouplingArgs,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 200)]
    t_steps: usize,
    /// Add re/im amplitude columns.
    #[arg(long)]
    amplitudes: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct EfficiencyArgs {
    #[arg(long, value_parser = parse_k)]
    k: BargmannIndex,
    #[arg(long = "L")]
    l: usize,
    #[command(flatten)]
    coupling: CouplingArgs,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
    Io(std::io::Error),
}

impl From<trilinear::Error> for Failure {
    fn from(e: trilinear::Error) -> Self {
        match e {
            trilinear::Error::Domain(_) | trilinear::Error::LabelMismatch { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::State(a) => commands::state(&a),
        Command::Figure(a) => commands::figure(&a),
        Command::Verify(a) => verify::run(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::Efficiency(a) => commands::efficiency(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
