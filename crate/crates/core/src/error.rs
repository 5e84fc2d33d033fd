use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid flag type: {0}")]
    InvalidFlagType(String),
    #[error("invalid admissible sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid admissible chain: {0}")]
    InvalidChain(String),
    #[error("flag types do not match: {0} vs {1}")]
    IncompatibleFlagTypes(String, String),
    #[error("operands live over different variable registries")]
    RegistryMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("no assignment for variable `{0}`")]
    MissingAssignment(String),
    #[error("denominator minor w{0} vanishes at the evaluation point")]
    DenominatorVanishes(usize),
    #[error("element is not a unit of the master ring: {0}")]
    NotAUnit(String),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("flag matrix does not lie in chart {0}")]
    OutOfChart(String),
    #[error("matrix does not represent a flag: {0}")]
    InvalidFlag(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
