//! The `ssllab` command-line tool: dataset generation, training, prediction,
//! decision-boundary grids, learning curves and replication runs.

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod datafile;
pub mod error;
pub mod modelfile;
pub mod output;
pub mod spec;
pub mod svg;

pub use error::{CliError, CliResult};

/// Seed used when neither `--seed` nor `SSLLAB_SEED` is given.
pub const DEFAULT_SEED: u64 = 1;
pub const SEED_ENV: &str = "SSLLAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "ssllab", version, about = "Semi-supervised classification experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a simulated dataset as CSV.
    Generate(commands::generate::GenerateArgs),
    /// Train a classifier on a CSV file; rows with an empty label are unlabeled.
    Train(commands::train::TrainArgs),
    /// Predict classes and decision values for every row of a CSV file.
    Predict(commands::predict::PredictArgs),
    /// Evaluate a 2-d model on a grid and optionally draw the boundary as SVG.
    Boundary(commands::boundary::BoundaryArgs),
    /// Run a learning-curve experiment described by a JSON config.
    LearningCurve(commands::learning_curve::LearningCurveArgs),
    /// Reproduce one of the reference experiments.
    Replicate(commands::replicate::ReplicateArgs),
}

/// `--seed`, else `SSLLAB_SEED`, else `DEFAULT_SEED`.
pub fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV}='{v}' is not an unsigned 64-bit integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(a) => commands::generate::run(&a),
        Command::Train(a) => commands::train::run(&a),
        Command::Predict(a) => commands::predict::run(&a),
        Command::Boundary(a) => commands::boundary::run(&a),
        Command::LearningCurve(a) => commands::learning_curve::run(&a),
        Command::Replicate(a) => commands::replicate::run(&a),
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // help and version requests exit 0, parse errors 2
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
