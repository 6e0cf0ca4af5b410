use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incompatible radicands: sqrt({0}) and sqrt({1})")]
    IncompatibleRadicands(u64, u64),
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
    #[error("radicand {0} does not fit in 64 bits")]
    RadicandOverflow(String),
    #[error("division by an interval containing zero: {0}")]
    DivisionByZeroInterval(String),
    #[error("square root of a negative interval: {0}")]
    NegativeRadicandInterval(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("operation is undefined for the exceptional class")]
    ExceptionalClassUnsupported,
    #[error("multiplicity index t = {t} is invalid for a class of degree {d}")]
    InvalidMultiplicityIndex { t: i64, d: i64 },
    #[error("r = {0} is outside the supported range")]
    UnsupportedR(i64),
    #[error("t = {t} must satisfy 1 <= t < d = {d}")]
    InvalidT { t: i64, d: i64 },
    #[error("t0 = {0} must be at least 2")]
    InvalidT0(i64),
    #[error("branch-and-bound exceeded depth limit {0} without a verdict")]
    DepthLimitExceeded(u32),
    #[error("mu = {0} is not above sqrt(r)")]
    NotAboveSqrtR(String),
    #[error("class has {got} multiplicities, expected {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("invalid curve class: {0}")]
    InvalidClass(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("enumeration stop rule violated: {0}")]
    MonotonicityViolated(String),
    #[error("no catalog witness for mu = {0} although mu >= mu0")]
    CoverageGap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
