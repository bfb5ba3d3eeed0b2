use std::path::PathBuf;

use depmark_core::analysis::AnalysisError;
use depmark_core::mc::SimError;
use depmark_core::{ModelError, SolveError};
use thiserror::Error;

/// Stable process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FINDING: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const NUMERIC: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// One `path:line:col: ...` line per error.
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numeric(String),
    #[error("write failed: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => exit::FINDING,
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse(_) | CliError::Output(_) => {
                exit::USAGE
            }
            CliError::Numeric(_) => exit::NUMERIC,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Model(m) => m.into(),
            SolveError::InvalidConfig(_)
            | SolveError::InvalidTime(_)
            | SolveError::GridNotAscending
            | SolveError::ShapeMismatch(_) => CliError::Usage(e.to_string()),
            SolveError::NumericFailure(_) | SolveError::StepTooLarge { .. } => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Solve { param, value, source } => match CliError::from(source) {
                CliError::Numeric(m) => CliError::Numeric(format!("{param} = {value}: {m}")),
                CliError::Usage(m) => CliError::Usage(format!("{param} = {value}: {m}")),
                other => CliError::Domain(format!("{param} = {value}: {other}")),
            },
            AnalysisError::UnknownParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Model(m) => m.into(),
            SimError::NoTrials | SimError::InvalidTime(_) => CliError::Usage(e.to_string()),
            SimError::EmptyInitial => CliError::Domain(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
