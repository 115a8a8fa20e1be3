// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulator and the trainer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mode index {index} out of range for {modes} modes")]
    IndexOutOfRange { index: usize, modes: usize },

    #[error("unsupported input state: {0}")]
    UnsupportedInput(String),

    #[error("matrix logarithm branch is ambiguous: eigenphase {phase} sits on the branch cut")]
    BranchAmbiguity { phase: f64 },

    #[error("starting fidelity window [{lo}, {hi}] not reached after {attempts} draws")]
    WindowUnreachable { lo: f64, hi: f64, attempts: usize },

    #[error("estimated and target input sets differ: {0}")]
    MismatchedInputs(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGeometry(_) => "invalid_geometry",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::UnsupportedInput(_) => "unsupported_input",
            Error::BranchAmbiguity { .. } => "branch_ambiguity",
            Error::WindowUnreachable { .. } => "window_unreachable",
            Error::MismatchedInputs(_) => "mismatched_inputs",
            Error::InvalidConfig(_) => "invalid_config",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
