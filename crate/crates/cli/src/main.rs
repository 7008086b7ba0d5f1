//! `lpvlfr`: convert, check, minimize and simulate ALPV and LFR models.
//!
//! Exit codes: 0 the checked property holds (or the command succeeded),
//! 1 it does not, 2 usage, parse or IO error, 3 an LPV-LFR was required.

mod commands;
mod error;
mod model_file;
mod signals;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lpvlfr::RankTolerance;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "lpvlfr", version, about = "ALPV and LFR model toolkit")]
struct Cli {
    /// Relative threshold for rank decisions and comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Absolute floor for rank decisions and comparisons.
    #[arg(long, global = true, default_value_t = 1e-12)]
    abs_tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert between representations.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Write the model here; otherwise it goes to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide a property of one or two models.
    Check {
        #[arg(value_enum)]
        mode: CheckMode,
        #[arg(required = true, num_args = 1..=2)]
        files: Vec<PathBuf>,
    },
    /// Reduce a model to a minimal one with the same behaviour.
    Minimize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate from zero initial state.
    Simulate {
        model: PathBuf,
        /// Input samples, one row per time step.
        #[arg(long)]
        input: PathBuf,
        /// Scheduling samples, one row per time step (needed when np > 0).
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Engine::Direct)]
        engine: Engine,
        /// Word length for the series engine (default 2T - 1 for T samples).
        #[arg(long)]
        word_horizon: Option<usize>,
    },
    /// Run the built-in two-state example and print its assertions.
    Example1 {
        /// Relative tolerance for comparisons against the rounded model.
        #[arg(long, default_value_t = lpvlfr::example1::PRINTED_PRECISION_TOL)]
        printed_tol: f64,
        /// Also write the example models as JSON files into this directory.
        #[arg(long)]
        write_models: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    AlpvToLfrMr,
    LfrToAlpv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckMode {
    Minimal,
    Equiv,
    Isomorphic,
    LpvStructure,
    LpvEquiv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Direct,
    Loop,
    Series,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let tol = RankTolerance::new(cli.rel_tol, cli.abs_tol).map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Convert { input, direction, output } => commands::convert(&input, direction, output.as_deref(), &tol),
        Command::Check { mode, files } => commands::check(mode, &files, &tol),
        Command::Minimize { input, output } => commands::minimize(&input, output.as_deref(), &tol),
        Command::Simulate { model, input, schedule, engine, word_horizon } => {
            commands::simulate(&model, &input, schedule.as_deref(), engine, word_horizon, &tol)
        }
        Command::Example1 { printed_tol, write_models } => {
            commands::example1(printed_tol, write_models.as_deref(), &tol)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
