//! Scenario-driven front end for `epaut-core`: parse TOML scenarios, run the
//! solvers, write CSV/SVG outputs and plot CSV files.

pub mod expr;
pub mod output;
pub mod plot;
pub mod runner;
pub mod scenario;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("{context}: {source}")]
    Run {
        context: String,
        #[source]
        source: epaut_core::Error,
    },
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} diagnostic(s) exceeded their thresholds")]
    Threshold(usize),
}

impl CliError {
    /// Process exit code: 1 run failure, 2 validation failure, 3 threshold failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Data(_) => 2,
            CliError::Run { .. } | CliError::Io { .. } => 1,
            CliError::Threshold(_) => 3,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
