use num_bigint::BigInt;
use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation undefined for the zero quaternion")]
    ZeroQuaternion,
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("{0} is not a sum of three squares")]
    NoRepresentation(BigInt),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("norms differ: {0} vs {1}")]
    NormMismatch(BigInt, BigInt),
    #[error("quaternion is not pure")]
    NotPure,
    #[error("conjugate ρμρ⁻¹ is not integral")]
    NotIntegral,
    #[error("invalid Z-basis [{a}, {b} + ω]: {reason}")]
    InvalidZBasis { a: BigInt, b: BigInt, reason: String },
    #[error("ideals live in different orders")]
    OrderMismatch,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("need two distinct two-square representations")]
    NotTwoRepresentations,
    #[error("order has neither a zero coefficient nor two coefficients of equal size")]
    ShapeMismatch,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("discriminants differ: {0} vs {1}")]
    DiscriminantMismatch(BigInt, BigInt),
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(BigInt),
    #[error("all arguments are zero")]
    AllZero,
    #[error("cycle exceeded the class number bound {0}")]
    CycleOverrun(u64),
    #[error("sign pattern is not separated")]
    NotSeparated,
    #[error("order has no sign")]
    NoSign,
}

pub type Result<T> = std::result::Result<T, Error>;
