use thiserror::Error;

/// Errors raised by the lab's numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("`{name}` = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: usize,
        lo: usize,
        hi: usize,
    },

    #[error("non-finite {what} at step {step}")]
    NonFinite { step: usize, what: &'static str },

    #[error("initial point lies outside the feasible domain")]
    Infeasible,

    #[error("trace does not record {0}")]
    Missing(&'static str),

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl LabError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        LabError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn check_range(name: &'static str, value: usize, lo: usize, hi: usize) -> Result<()> {
        if value < lo || value > hi {
            Err(LabError::OutOfRange { name, value, lo, hi })
        } else {
            Ok(())
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
