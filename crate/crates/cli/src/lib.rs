//! Command-line front end: geometry files, subcommands and JSON reports.

pub mod commands;
pub mod geomfile;
pub mod report;

use thiserror::Error;

pub use commands::{execute, Cli, Command, Output};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const INPUT: u8 = 2;
    pub const PRECONDITION: u8 = 3;
    pub const VERIFY_FAILED: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Load { line: usize, message: String },

    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] kosmann_core::Error),
}

impl CliError {
    /// Unknown field names are reported alongside the mathematical
    /// preconditions, since the file itself loaded fine.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_mathematical() => exit::PRECONDITION,
            CliError::Core(kosmann_core::Error::UnknownField(_)) => exit::PRECONDITION,
            _ => exit::INPUT,
        }
    }
}
