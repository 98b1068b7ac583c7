use thiserror::Error;

/// Failures reported by the library. Every variant maps to one CLI exit class.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid anchor: anchor norm {0} is not positive")]
    InvalidAnchor(i64),
    #[error("infeasible query: {0}")]
    InfeasibleQuery(String),
    #[error("cap {cap} is below 2*phi = {min}")]
    CapTooSmall { cap: i64, min: i64 },
    #[error("no decomposition found: {0}")]
    DecompositionNotFound(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("unsatisfiable pairing spec: {0}")]
    UnsatisfiablePairingSpec(String),
    #[error("arithmetic bound exceeded: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn overflow(what: &str) -> Error {
    Error::Overflow(format!("{what} does not fit in 128-bit arithmetic"))
}
