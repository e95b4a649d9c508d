//! Error type of the driver, mapped onto process exit codes.

use std::path::PathBuf;

use thiserror::Error;

/// Exit code 2: the configuration could not be parsed or validated.
/// Exit code 3: a computation failed (e.g. zero post-selection probability).
/// Exit code 4: an output file could not be written.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),

    #[error("computation error: {0}")]
    Compute(#[from] cavern_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Compute(_) => 3,
            AppError::Io { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Config(_) => "config",
            AppError::Compute(_) => "computation",
            AppError::Io { .. } => "io",
        }
    }

    /// Machine-readable error record for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "code": self.exit_code(),
                "kind": self.kind(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}

pub type Result<T> = std::result::Result<T, AppError>;
