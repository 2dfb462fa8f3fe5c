//! Command-line front end: file I/O, synthetic benchmarks, the sweep
//! harness and CSV emission.
//!
//! Exit codes: `0` success, `2` bad arguments or unreadable input, `3`
//! numerical failure, `4` a validation threshold was exceeded.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use wh2_core::lti::{parse, serialize, ModalBenchmark, StateSpace};

pub mod args;
mod commands;
pub mod sweep;

pub use args::{Cli, Command, Method};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_THRESHOLD: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(wh2_core::Error),
    Threshold(String),
    /// Sweep cells whose reduction or error evaluation failed.
    CellFailures(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) | CliError::CellFailures(_) => EXIT_NUMERICAL,
            CliError::Threshold(_) => EXIT_THRESHOLD,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Threshold(m) => write!(f, "validation failed: {m}"),
            CliError::CellFailures(k) => write!(f, "numerical failure in {k} sweep cells"),
        }
    }
}

impl From<wh2_core::Error> for CliError {
    fn from(e: wh2_core::Error) -> Self {
        match e {
            wh2_core::Error::Parse { .. } => CliError::Input(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses `argv` (program name first) and runs the subcommand, writing
/// regular output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "wh2: {e}");
            e.exit_code()
        }
    }
}

pub fn read_system(path: &Path) -> CliResult<StateSpace> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write_system(path: &Path, sys: &StateSpace) -> CliResult<()> {
    std::fs::write(path, serialize(sys)).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Synthetic full-order model: modal benchmark with default parameters.
pub fn benchmark_g(order: usize, seed: u64) -> CliResult<StateSpace> {
    Ok(ModalBenchmark::new(order, seed).build()?)
}

/// Synthetic weight: better damped, lower band than [`benchmark_g`].
pub fn benchmark_w(order: usize, seed: u64) -> CliResult<StateSpace> {
    Ok(ModalBenchmark::new(order, seed.wrapping_add(1))
        .with_damping(0.3, 0.7)
        .with_frequencies(0.5, 20.0)
        .build()?)
}

/// Synthetic plant for the closed-loop weight.
pub fn benchmark_plant(order: usize, seed: u64) -> CliResult<StateSpace> {
    Ok(ModalBenchmark::new(order, seed.wrapping_add(2)).build()?)
}

/// Formats a float for CSV output: shortest round-trip representation.
pub fn csv_float(x: f64) -> String {
    format!("{x:e}")
}
