use thiserror::Error;

use crate::algebra::poly::Poly;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by a non-unit series")]
    DivisionByNonUnit,
    #[error("series is not invertible under composition")]
    NotInvertible,
    #[error("zero divisor modulo the branch modulus")]
    ZeroDivisor,
    #[error("modulus splits")]
    Split(Poly, Poly),
    #[error("partition sizes differ: {0} vs {1}")]
    SizeMismatch(u32, u32),
    #[error("trivial profile in a weight")]
    TrivialProfile,
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("the two Hurwitz routes disagree at {0}")]
    InconsistentDefinitions(String),
    #[error("genus is not an integer")]
    NonIntegral,
    #[error("cross-check failed: {0}")]
    CrossCheckFailure(String),
    #[error("coefficient not determined by the truncation")]
    InsufficientTruncation,
    #[error("window too small for an interior row")]
    WindowTooSmall,
    #[error("degenerate model: LM <= 1")]
    DegenerateModel,
    #[error("ramification is not simple")]
    NonSimpleRamification,
    #[error("local expansion order too small: {0}")]
    InsufficientLocalOrder(String),
    #[error("order mismatch: {0}")]
    OrderMismatch(String),
    #[error("sample point is not generic")]
    NonGenericSamplePoint,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
