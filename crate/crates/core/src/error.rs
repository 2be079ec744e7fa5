use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {p}^{k} does not fit in 32 bits")]
    Overflow { p: u64, k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {0} does not belong to this field")]
    ContextMismatch(u64),
    #[error("gcd/lcm of two zero polynomials is undefined")]
    BothZero,
    #[error("enumeration needs {required} elements, cap is {cap}")]
    CapExceeded { required: u128, cap: u64 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid delta: {0}")]
    InvalidDelta(String),
    #[error("precision not reachable within {cap} iterations")]
    PrecisionUnreachable { cap: usize },
    #[error("soundness violation: {0}")]
    SoundnessViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
