use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point is not regular: {0}")]
    NotRegular(String),

    #[error("non-finite value at step {step}")]
    NonFinite { step: usize },

    #[error("search budget exceeded: N = {n} > {limit} (raise the budget explicitly)")]
    Budget { n: usize, limit: usize },

    #[error("truncation order {requested} too short, minimum is {minimum}")]
    Truncation { requested: i32, minimum: i32 },

    #[error("nonzero obstruction at exponent {exponent}: {value}")]
    Obstruction { exponent: i32, value: String },
}

impl Error {
    /// True for errors caused by bad inputs rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidParameter(_)
                | Error::Precondition(_)
                | Error::NotRegular(_)
                | Error::Truncation { .. }
        )
    }
}
