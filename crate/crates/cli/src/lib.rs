//! Scenario files and command-line front-end for `ebac-core`.
//!
//! The binary `ebac` is a thin wrapper over [`run`]; everything it prints is
//! produced by [`commands::execute`] and is byte-for-byte deterministic.

pub mod args;
pub mod commands;
pub mod number;
pub mod scenario;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ebac_core::{AdmissionError, BandwidthError, SimError};
use thiserror::Error;

pub use args::{Cli, Command, Common, Format};
pub use commands::{execute, Output, EXIT_ERROR, EXIT_OK, EXIT_REJECTED, EXIT_VIOLATION};
pub use scenario::{Scenario, ScenarioError, ScenarioFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Bandwidth(#[from] BandwidthError),
    #[error(transparent)]
    Admission(#[from] AdmissionError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

/// Execute `cli`, writing the result to `--out` or `stdout`, and return the
/// process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<u8, CliError> {
    let output = execute(&cli.command)?;
    for (path, text) in &output.files {
        write_file(path, text)?;
    }
    match &cli.command.common().out {
        Some(path) => write_file(path, &output.text)?,
        None => stdout
            .write_all(output.text.as_bytes())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            })?,
    }
    Ok(output.exit)
}
