use thiserror::Error;

/// Errors raised by the exact arithmetic and expansion routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("elements belong to different cyclotomic fields (orders {0} and {1})")]
    FieldMismatch(u64, u64),

    #[error("{0} is not coprime to the field order {1}")]
    NotCoprime(i64, u64),

    #[error("vectors have mismatched lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("insufficient precision: need coefficients below {needed}, have below {available}")]
    InsufficientPrecision { needed: String, available: String },

    #[error("series is not normalized: {0}")]
    NotNormalized(String),

    #[error("invalid level {0}")]
    InvalidLevel(i64),

    #[error("residue {residue} is divisible by the level {level}")]
    ResidueDivisibleByLevel { residue: i64, level: u64 },

    #[error("{small} does not divide {large}")]
    NotADivisor { small: u64, large: u64 },

    #[error("index (0, 0) mod {0} does not define a Siegel unit")]
    ZeroSiegelIndex(u64),

    #[error("units have different levels ({0} and {1})")]
    LevelMismatch(u64, u64),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}
