use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod format;

use commands::{CoherenceArgs, CorrelationArgs, DistArgs, Failure, TrajectoryArgs, VerifyArgs};

/// Finite-resolution photon-number measurements: outcome distributions,
/// post-measurement coherence, correlation sweeps, trajectories and self-checks.
#[derive(Debug, Parser)]
#[command(name = "fockpovm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Outcome density P(n_m) on a grid.
    Dist(DistArgs),
    /// Outcome density and post-measurement coherence <a>_f(n_m) on a grid.
    Coherence(CoherenceArgs),
    /// Quantization/coherence correlation as a function of the resolution.
    Correlation(CorrelationArgs),
    /// Ensemble of repeated-measurement trajectories.
    Trajectory(TrajectoryArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("FOCKPOVM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("FOCKPOVM_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::Dist(args) => commands::dist(args),
        Command::Coherence(args) => commands::coherence(args),
        Command::Correlation(args) => commands::correlation(args),
        Command::Trajectory(args) => commands::trajectory(args),
        Command::Verify(args) => commands::verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
