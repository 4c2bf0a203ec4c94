use thiserror::Error;

/// Rejection of a whole batch, raised before any pricing kernel runs.
///
/// `index` is the first offending row.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BatchError {
    #[error("row {index}: column {column} has length {len}, expected 1 or {expected}")]
    ShapeMismatch { index: usize, column: String, len: usize, expected: usize },
    #[error("row {index}: column flag: unrecognised flag {token:?} (expected c or p)")]
    BadFlag { index: usize, token: String },
    #[error("row {index}: column {column}: non-finite value {value}")]
    NonFiniteInput { index: usize, column: String, value: f64 },
    #[error("row {index}: column {column}: {detail}")]
    Domain { index: usize, column: String, detail: String },
    #[error("row {index}: column {column}: {detail}")]
    Parse { index: usize, column: String, detail: String },
    #[error("missing column {column}")]
    MissingColumn { column: String },
}

impl BatchError {
    /// First offending row, when the error is tied to one.
    pub fn index(&self) -> Option<usize> {
        match self {
            BatchError::ShapeMismatch { index, .. }
            | BatchError::BadFlag { index, .. }
            | BatchError::NonFiniteInput { index, .. }
            | BatchError::Domain { index, .. }
            | BatchError::Parse { index, .. } => Some(*index),
            BatchError::MissingColumn { .. } => None,
        }
    }

    pub fn column(&self) -> &str {
        match self {
            BatchError::BadFlag { .. } => "flag",
            BatchError::ShapeMismatch { column, .. }
            | BatchError::NonFiniteInput { column, .. }
            | BatchError::Domain { column, .. }
            | BatchError::Parse { column, .. }
            | BatchError::MissingColumn { column } => column,
        }
    }
}
