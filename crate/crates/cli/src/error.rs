use std::io;
use std::process::ExitCode;

use thiserror::Error;

/// CLI failure, classified for the exit-code contract.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub const CONFIG: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const DEGENERATE: u8 = 4;
    pub const IO: u8 = 5;

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => Self::CONFIG,
            CliError::Parse(_) => Self::PARSE,
            CliError::Degenerate(_) => Self::DEGENERATE,
            CliError::Io(_) => Self::IO,
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config error",
            CliError::Parse(_) => "parse error",
            CliError::Degenerate(_) => "degenerate data",
            CliError::Io(_) => "i/o error",
        }
    }
}

impl From<fracdim::Error> for CliError {
    fn from(e: fracdim::Error) -> Self {
        use fracdim::Error as E;
        match e {
            E::Config(_) | E::InsufficientData { .. } => CliError::Config(e.to_string()),
            E::Degenerate { .. } | E::Domain(_) => CliError::Degenerate(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
