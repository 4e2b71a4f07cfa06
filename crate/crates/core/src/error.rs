use thiserror::Error;

/// Errors raised by the series engine, the matrix layer and the verifiers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("scale {to} is not a multiple of {from}")]
    IncompatibleScale { from: i64, to: i64 },

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("divergent product or sum: {0}")]
    Divergent(String),

    #[error("{what} requires dimension >= {min}, got {got}")]
    InvalidDimension { what: &'static str, min: usize, got: usize },

    #[error("matrix is not positive definite: pivot {index} is {pivot}")]
    NotPositiveDefinite { index: usize, pivot: String },

    #[error("LDL^T factorization failed at pivot {index}: zero pivot with nonzero column")]
    FactorizationFailure { index: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("singular Bailey parameter: {0}")]
    SingularParameter(String),

    #[error("prefix length {have} is insufficient; need at least {need}")]
    InsufficientLength { have: usize, need: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient overflow in fixed-width accumulator")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InsufficientLength { .. } | Error::Overflow => 4,
            _ => 3,
        }
    }
}
