use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("p must be prime (got {0})")]
    NotPrime(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid incidence parameters: {0}")]
    InvalidSpec(String),

    #[error(
        "family of {size} subspaces exceeds the resource cap of {cap}; \
         raise the cap or pass the override flag"
    )]
    ResourceCap { size: String, cap: u64 },

    #[error("p = {p} is above the verification limit of {limit} without override")]
    PrimeTooLarge { p: u64, limit: u64 },

    #[error("modulus p^{exponent} for p = {p} does not fit the fixed-width backend")]
    PrecisionExceeded { p: u64, exponent: u32 },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
