use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("modulus {0} is outside the supported range [2, 2^32)")]
    ModulusOutOfRange(u64),
    #[error("operation not supported in characteristic {0}")]
    UnsupportedCharacteristic(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("field has {size} elements, enumeration cap is {cap}")]
    FieldTooLarge { size: u128, cap: u64 },
    #[error("Frobenius level {0} is out of range")]
    InvalidLevel(u32),
    #[error("coefficient ring mismatch")]
    RingMismatch,
    #[error("index {0} is not invertible in the coefficient ring")]
    NonInvertibleIndex(u64),
    #[error("coefficient ring is not a field")]
    RingNotField,
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("parts sum to {sum}, expected {total}")]
    BadPartition { sum: u64, total: u64 },
    #[error("Lucas factorization of H{{{n}}} mod {p} does not match the direct construction")]
    FactorizationMismatch { n: u64, p: u64 },
    #[error("Legendre parameter must not be 0 or 1")]
    DegenerateParameter,
    #[error("supersingularity test requires odd characteristic")]
    CharTwoUnsupported,
    #[error("needs {needed} term slots, budget is {budget}")]
    ResourceCap { needed: u128, budget: u64 },
    #[error("mismatch detected:\n{0}")]
    MismatchDetected(String),
    #[error("cannot parse {0:?} as a field element")]
    ParseElement(String),
}
