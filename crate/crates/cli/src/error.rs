use std::process::ExitCode;

use thiserror::Error;

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_NO_PATH: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{0}")]
    Inconclusive(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Input(_) | CliError::Write { .. } => EXIT_INPUT,
            CliError::Inconclusive(_) => EXIT_INCONCLUSIVE,
        })
    }
}

/// Library errors reached through user input.
pub fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}
