//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the library. Variants map onto CLI exit codes via [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("model is not odd degree 2g+1: {0}")]
    NotOddModel(String),
    #[error("curve is singular: f is not squarefree")]
    SingularCurve,
    #[error("basis violates pole structure: {0}")]
    BadBasis(String),
    #[error("F must have a simple pole at infinity: {0}")]
    BadF(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("zero input has no pole order")]
    ZeroInput,
    #[error("odd pole order {0} cannot be reached by the monomial basis")]
    OddGapUnreachable(i64),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("bad letter {0}")]
    BadLetter(usize),
    #[error("alphabet or degree mismatch")]
    AlphabetMismatch,
    #[error("constant term must be {0}")]
    BadConstantTerm(&'static str),
    #[error("coefficients not in normal form")]
    UndecidableCoefficients,
    #[error("residue obstruction: {0}")]
    NotIntegrable(String),
    #[error("precision budget exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("obstruction found: {0}")]
    ObstructionFound(String),
    #[error("curve is not elliptic")]
    NotElliptic,
    #[error("missing logarithmic extension")]
    MissingExtension,
    #[error("unsupported level: {0}")]
    UnsupportedLevel(String),
    #[error("F0 lift is not primitive: {0}")]
    NonPrimitiveLift(String),
    #[error("form has pole order {0} >= 2 against dpi")]
    NonLogPole(i64),
    #[error("oracle has no value for prefix {0}")]
    OracleMissingValue(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("basepoint needed: {0}")]
    MissingBasepoint(String),
}

impl Error {
    /// CLI exit status: 2 invalid input, 3 computation error, 4 precision exhausted.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotOddModel(_)
            | Error::SingularCurve
            | Error::BadBasis(_)
            | Error::BadF(_)
            | Error::OutOfRange(_)
            | Error::BadLetter(_)
            | Error::AlphabetMismatch
            | Error::InvalidInput(_)
            | Error::MissingBasepoint(_)
            | Error::NotElliptic
            | Error::UnsupportedLevel(_)
            | Error::OracleMissingValue(_)
            | Error::NonLogPole(_) => 2,
            Error::InsufficientPrecision(_) | Error::PrecisionExhausted(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
