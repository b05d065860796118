use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NON_CONVERGENCE: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Core(#[from] spinwrite::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv: {0}")]
    Csv(csv::Error),

    #[error("json: {0}")]
    Json(serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use spinwrite::Error as E;
        match self {
            CliError::Core(E::NonConvergence { .. }) => EXIT_NON_CONVERGENCE,
            CliError::Core(E::Certification { .. } | E::RefinementFailed { .. } | E::RoundTrip { .. }) => {
                EXIT_CERTIFICATION
            }
            CliError::Io { .. } | CliError::Csv(_) | CliError::Json(_) => EXIT_IO,
            CliError::Config(_) | CliError::Core(_) => EXIT_FAILURE,
        }
    }
}
