use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("fiber configuration must contain at least one fiber")]
    EmptyConfiguration,
    #[error("fiber {index} has non-positive cycle length {value}")]
    NonPositiveLength { index: usize, value: i64 },
    #[error("chi must be positive, got {0}")]
    NonPositiveChi(i64),
    #[error("Euler number mismatch: fiber lengths sum to {sum}, expected 12*chi = {expected}")]
    EulerMismatch { sum: u64, expected: u64 },
    #[error("expected {expected} component numbers, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("component number {value} at fiber {index} is outside [0, {modulus})")]
    ComponentOutOfRange { index: usize, value: i64, modulus: u64 },
    #[error("order must be positive")]
    NonPositiveOrder,
    #[error("component {value} at fiber {index} is not killed by the order {order} (modulus {modulus})")]
    NotTorsionOfOrder { index: usize, value: u64, modulus: u64, order: u64 },
    #[error("fiber index {index} out of range for {len} fibers")]
    FiberIndexOutOfRange { index: usize, len: usize },
    #[error("component index {k} out of range for a fiber of length {modulus}")]
    ComponentIndexOutOfRange { k: u64, modulus: u64 },
    #[error("the zero section carries no information for this operation")]
    ZeroSection,
    #[error("operation requires a section of order {expected}, found order {actual}")]
    WrongOrder { expected: String, actual: u64 },
    #[error("assignment is not in minimal form at fiber {index}")]
    NonMinimal { index: usize },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("order must be at least 2, got {0}")]
    OrderTooSmall(u64),
    #[error("fraction k/m = {k}/{modulus} at fiber {index} is not a multiple of 1/{order}")]
    NotMultipleOfInverseOrder { index: usize, k: u64, modulus: u64, order: u64 },
    #[error("Bernoulli index {0} is not supported")]
    UnsupportedBernoulli(u32),
    #[error("vector dimension {actual} does not match lattice rank {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("linear system is inconsistent")]
    InconsistentSystem,
    #[error("configuration must be strict (sum of m_j = 12 chi)")]
    NotStrict,
}

pub type Result<T> = std::result::Result<T, Error>;
