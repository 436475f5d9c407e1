//! Library side of the `jpurn` command-line tool. [`run`] executes a parsed
//! command and returns the exit status; the binary is a thin wrapper.

pub mod args;
mod commands;
pub mod output;
pub mod params;

use std::process::ExitCode;

pub use args::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    InvalidParameters(String),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl From<jpurn_core::Error> for CliError {
    fn from(e: jpurn_core::Error) -> Self {
        match e {
            jpurn_core::Error::InvalidParameters(_) => CliError::InvalidParameters(e.to_string()),
            other => CliError::Runtime(anyhow::Error::new(other)),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::InvalidParameters(_) | CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    use args::Command;
    match cli.command {
        Command::Coeffs(a) => commands::coeffs(a),
        Command::Verify(a) => commands::verify(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Compare(a) => commands::compare(a),
        Command::Poly(a) => commands::poly(a),
        Command::Graph(a) => commands::graph(a),
    }
}

/// Runs and maps the outcome to the documented exit codes.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jpurn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
