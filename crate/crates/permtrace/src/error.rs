//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {size} exceeds cap {cap}")]
    CapExceeded { size: u64, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("no quadratic non-residue in even characteristic")]
    EvenCharacteristic,
    #[error("subfield degree {t} does not divide {m}")]
    BadSubfieldDegree { t: u32, m: u32 },
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("the big field is not a quadratic extension (n = {0}, expected 2)")]
    NotQuadraticExtension(u32),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("construction inconsistent: {0}")]
    ConstructionInconsistent(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
