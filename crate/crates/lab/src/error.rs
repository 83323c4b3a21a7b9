use std::fmt;

use ptlab_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, LabError>;

/// Failures of a command, split by the exit code they map to.
#[derive(Debug)]
pub enum LabError {
    /// Malformed configuration or arguments outside an operation's domain.
    Validation(String),
    /// A computation ran but failed or violated a checked invariant.
    Numerical(String),
    Io(std::io::Error),
}

impl LabError {
    pub fn validation(msg: impl Into<String>) -> Self {
        LabError::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        LabError::Numerical(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Validation(_) => 2,
            LabError::Numerical(_) => 3,
            LabError::Io(_) => 1,
        }
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Validation(m) => write!(f, "validation error: {m}"),
            LabError::Numerical(m) => write!(f, "numerical failure: {m}"),
            LabError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for LabError {}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e)
    }
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter(_)
            | CoreError::DimensionTooSmall { .. }
            | CoreError::GridTooSmall(_)
            | CoreError::NonUniformGrid
            | CoreError::DegeneratePoint { .. }
            | CoreError::ScalingMismatch { .. } => LabError::Validation(e.to_string()),
            _ => LabError::Numerical(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Validation(format!("malformed JSON: {e}"))
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Validation(format!("malformed CSV: {e}"))
    }
}
