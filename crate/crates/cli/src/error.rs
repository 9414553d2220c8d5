use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Parse(String),
    #[error("config: `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("environment override {var}: {message}")]
    Env { var: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(#[from] eclimb_core::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status: 2 bad input, 3 solver failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        use eclimb_core::Error as E;
        match self {
            CliError::ConfigRead { .. } | CliError::Write { .. } => 4,
            CliError::Model(e) => {
                let inner = match e {
                    E::Segment { source, .. } => source.as_ref(),
                    other => other,
                };
                match inner {
                    E::NoInteriorOptimum { .. }
                    | E::SufficientConditionViolated { .. }
                    | E::NoConvergence { .. }
                    | E::EnvelopeInconsistency { .. } => 3,
                    _ => 2,
                }
            }
            _ => 2,
        }
    }
}
