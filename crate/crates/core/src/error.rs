use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("quadratic space is anisotropic")]
    AnisotropicSpace,
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("quadratic space is not regular")]
    NotRegular,
    #[error("quadratic space has odd dimension")]
    OddDimension,
    #[error("undefined composition: {0}")]
    UndefinedComposition(String),
    #[error("p = {p} divides the level {level}")]
    DividesLevel { p: u64, level: u64 },
    #[error("insufficient trace bound: need {needed}, input covers {available}")]
    InsufficientBound { needed: i64, available: i64 },
    #[error("degree {0} exceeds the supported maximum")]
    DegreeTooLarge(usize),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("genus representatives disagree: {0}")]
    MixedGenus(String),
    #[error("frame is not contained in the (1/p)-overlattice")]
    NotInOverlattice,
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("parse error: {0}")]
    Parse(String),
}
