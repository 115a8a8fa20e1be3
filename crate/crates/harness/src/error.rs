// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] ccwave::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("{path}, line {line}: {source}")]
    Record { path: PathBuf, line: usize, source: serde_json::Error },

    #[error("invalid scenario: {0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error("files do not align: {0}")]
    Misaligned(String),
}

impl HarnessError {
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Core(e) => e.kind(),
            HarnessError::Io { .. } => "io",
            HarnessError::Json { .. } => "json",
            HarnessError::Record { .. } => "record",
            HarnessError::Config(_) => "config",
            HarnessError::Usage(_) => "usage",
            HarnessError::Misaligned(_) => "misaligned",
        }
    }

    /// Process exit code: 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Usage(_) | HarnessError::Json { .. } => 2,
            HarnessError::Core(ccwave::Error::InvalidConfig(_)) => 2,
            _ => 1,
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport {
            error: ErrorBody { kind: self.kind().to_string(), message: self.to_string() },
        }
    }
}

/// Machine-readable failure printed by the CLI.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
