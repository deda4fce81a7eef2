use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("GF({p}^{f}) is outside the supported envelope q <= 2^16")]
    EnvelopeExceeded { p: u32, f: u32 },
    #[error("operation needs characteristic {expected}, field has characteristic {found}")]
    WrongCharacteristic { expected: u32, found: u32 },
    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("inconsistent group spec: {0}")]
    InconsistentSpec(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix does not preserve the form")]
    NotAnIsometry,
    #[error("group of order {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: String, cap: u64 },
    #[error("no prime = 1 mod {exponent} found below the search bound")]
    NoSuitablePrime { exponent: u64 },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("no irreducible character of degree {0} (Steinberg) in the table")]
    SteinbergNotFound(String),
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("unsupported family for this operation: {0}")]
    UnsupportedFamily(String),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
