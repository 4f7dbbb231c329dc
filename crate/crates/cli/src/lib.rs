//! Command-line front end: network files, analysis commands and reports.

pub mod commands;
pub mod netfile;
pub mod report;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Analysis(#[from] advnet::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(advnet::Error::Undetermined { .. }) => EXIT_UNDETERMINED,
            _ => EXIT_INPUT,
        }
    }
}
