use thiserror::Error;

/// Errors raised by the laboratory operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A wide-integer computation would overflow.
    #[error("integer overflow: {0}")]
    Overflow(String),

    /// The pre-flight estimate exceeds the configured resource budget.
    #[error("resource budget exceeded: {what} needs ~{needed} but the budget is {budget}")]
    Budget {
        what: String,
        needed: u128,
        budget: u128,
    },

    /// An identity that must hold exactly was violated.
    #[error("hard identity failure: {0}")]
    HardIdentity(String),

    /// An identifier (bound source, figure, mode) was not recognised.
    #[error("unknown identifier: {0}")]
    Unknown(String),

    /// The witness construction could not find an admissible prime.
    #[error("no admissible prime: {0}")]
    NoAdmissiblePrime(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Domain(msg.into()))
}
