use thiserror::Error;

use crate::ring::RingId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is zero or a unit")]
    ZeroOrUnit(String),

    #[error("{element} is not prime in {ring}")]
    NotPrime { element: String, ring: RingId },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("residue field has {q} elements, above the tabulation cap of {cap}")]
    FieldTooLarge { q: u64, cap: u64 },

    #[error("matrix does not have determinant 1 over the residue field")]
    NotSpecialLinear,

    #[error("vectors are linearly dependent")]
    Dependent,

    #[error("determinant already lies in the unit image")]
    AlreadyDeterminantU,

    #[error("projected simplex count {projected} exceeds the cap of {cap}")]
    ResourceCap { projected: u128, cap: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("complex is not connected")]
    Disconnected,

    #[error("complex is empty")]
    EmptyComplex,

    #[error("expected a {expected} complex, got {found}")]
    WrongComplexType { expected: String, found: String },

    #[error("reduced homology is not concentrated in degree {degree}: {betti:?}")]
    WedgeProfile { degree: usize, betti: Vec<usize> },

    #[error("malformed complex file at line {line}: {reason}")]
    Format { line: usize, reason: String },
}
