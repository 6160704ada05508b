//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by constructors, guards and parsers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field too large for enumeration: q = {q} exceeds the bound {max} (set MODREP_MAX_Q to raise it)")]
    TooLarge { q: u64, max: u64 },
    #[error("operation needs an odd characteristic")]
    EvenCharacteristic,
    #[error("zero element where a unit is required")]
    ZeroElement,
    #[error("field level mismatch: {0}")]
    LevelMismatch(String),
    #[error("degree profile mismatch: expected {expected:?}, got {got:?}")]
    ProfileMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("slot {slot} out of range for f = {f}")]
    SlotOutOfRange { slot: usize, f: usize },
    #[error("profile {profile:?} too small for generator of multidegree {generator:?}")]
    ProfileTooSmall { profile: Vec<usize>, generator: Vec<usize> },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("rewriting did not terminate within {budget} moves")]
    NonTerminating { budget: usize },
    #[error("p = {p} divides binomial({r}, {m}){hint}")]
    BadBinomial { p: u64, r: usize, m: usize, hint: String },
    #[error("degree {r} too small: need at least {min} for the full quotient")]
    DegreeTooSmall { r: usize, min: usize },
    #[error("{p} does not divide {r}")]
    NotDivisible { p: u64, r: usize },
    #[error("operator output overflows slot {slot}: degree {degree} > {cap}")]
    ProfileOverflow { slot: usize, degree: usize, cap: usize },
    #[error("parameter out of range: {0}")]
    RangeError(String),
    #[error("{m}! is not invertible mod {p}")]
    FactorialNotInvertible { p: u64, m: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
