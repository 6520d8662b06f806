use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {0} is not p-local")]
    PLocalityViolation(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("structure map inconsistency: {0}")]
    Internal(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("normalization did not terminate within {0} steps")]
    NormalizationDiverged(usize),
    #[error("not divisible: {0}")]
    Divisibility(String),
    #[error("no p-local solution: {0}")]
    NoSolution(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("invalid delta {0}; expected 2, 5 or 8")]
    InvalidDelta(i64),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },
    #[error("invalid configuration: {0}")]
    Config(String),
}
