use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("monomial needs occupations up to {required} but the cutoff is {cutoff}")]
    Truncation { required: usize, cutoff: usize },

    #[error("criterion not applicable: {0}")]
    Inapplicable(String),

    #[error("no support: {0}")]
    EmptySupport(String),

    #[error("aliasing: {samples} phase samples cannot resolve frequency {frequency}")]
    Aliasing { samples: usize, frequency: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by the numerics rather than by the caller's inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
