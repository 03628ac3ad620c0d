//! `grushin-lab <analyze|grushin|validate|pseudospectrum> --config <path> --out <dir> [--workers N]`
//!
//! Exit codes: 0 success, 2 invalid config, 3 assumption violated,
//! 4 numerical failure.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use grushin_core::Error;

use config::ProblemSpec;
use run::{execute, Command, RunError};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Quadratic layer only.
    Analyze,
    /// Kernels, effective matrices, margins and the eigenvalue expansion.
    Grushin,
    /// Grushin layer plus diagonalization fits.
    Validate,
    /// Resolvent norm grids and region checks.
    Pseudospectrum,
}

#[derive(Debug, Parser)]
#[command(name = "grushin-lab", version, about = "Grushin-reduction experiments on polynomial symbol jets")]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// JSON problem specification.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for parallel scans.
    #[arg(long)]
    workers: Option<usize>,
}

fn exit_code(e: &RunError) -> u8 {
    match e {
        RunError::Config(_) | RunError::Io(_) => 2,
        RunError::Core(err) => match err {
            Error::AssumptionViolated { .. } => 3,
            Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::BasisTooLarge { .. }
            | Error::DegreeExceedsGuard { .. } => 2,
            _ => 4,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.command {
        Cmd::Analyze => Command::Analyze,
        Cmd::Grushin => Command::Grushin,
        Cmd::Validate => Command::Validate,
        Cmd::Pseudospectrum => Command::Pseudospectrum,
    };
    let spec = match ProblemSpec::load(&cli.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: invalid config: {}", e.0);
            return ExitCode::from(2);
        }
    };
    if cli.workers == Some(0) {
        eprintln!("error: --workers must be positive");
        return ExitCode::from(2);
    }
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: cannot create {}: {e}", cli.out.display());
        return ExitCode::from(2);
    }
    match execute(cmd, &spec, &cli.out, cli.workers) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = match &e {
                RunError::Config(m) => format!("invalid config: {m}"),
                RunError::Io(m) => format!("i/o: {m}"),
                RunError::Core(err) => err.to_string(),
            };
            eprintln!("error: {msg}");
            ExitCode::from(exit_code(&e))
        }
    }
}
