use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The measure (or density) violates a structural invariant.
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// The quadrature grid cannot resolve the requested frequencies.
    #[error("grid of size {grid} cannot resolve frequency {frequency} (need at least {required})")]
    Resolution {
        grid: usize,
        frequency: usize,
        required: usize,
    },

    /// A coefficient or moment sequence is too short for the requested operation.
    #[error("sequence cutoff {available} is too small, need at least {required}")]
    InsufficientCutoff { available: usize, required: usize },

    /// A quadratic form came out with a non-negligible imaginary part.
    #[error("form has imaginary residue {residue:e} above tolerance {tolerance:e}")]
    NonRealForm { residue: f64, tolerance: f64 },

    /// The operation does not apply to this input (e.g. a witness for a measure without atoms).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures caused by numerical resolution limits rather than malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Resolution { .. } | Error::InsufficientCutoff { .. } | Error::NonRealForm { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
