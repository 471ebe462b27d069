use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sequence offset must be 0 (got {0}); re-index the sequence first")]
    NonZeroOffset(u64),

    #[error("empty sequence")]
    EmptySequence,

    #[error("sieve limit {limit} exceeds the supported maximum {max}")]
    SieveLimit { limit: u64, max: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prefix too short: need at least {needed} terms, got {got}")]
    PrefixTooShort { needed: usize, got: usize },

    #[error("first term must be 1 (got {0})")]
    LeadingTermNotOne(String),

    #[error("growth function must satisfy phi(0) = 1 (got {0})")]
    GrowthNotNormalized(String),

    #[error("growth table has no value at n = {0}")]
    GrowthTableExhausted(usize),

    #[error("divisor must be positive")]
    NonPositiveDivisor,

    #[error("all terms are zero")]
    AllZero,

    #[error("infeasible search budget: {0}")]
    BudgetInfeasible(String),

    #[error("leading polynomial vanishes at n = {0}")]
    LeadingZero(u64),

    #[error("extension leaves the integers at n = {0}")]
    NonIntegral(u64),

    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("search exceeded: {0}")]
    SearchExceeded(String),

    #[error("scan cap exceeded: {0}")]
    CapExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
