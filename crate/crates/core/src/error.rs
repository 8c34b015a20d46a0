use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition on the arguments does not hold.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Polynomial or rational text could not be parsed.
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    /// An enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {required} forms required, budget is {budget}")]
    Budget { required: u128, budget: u128 },
    /// `p^e` is too large for the exponent arithmetic.
    #[error("depth overflow: {p}^{e} is out of range")]
    Overflow { p: u64, e: u32 },
    /// A computation contradicted the classification it relies on.
    #[error("anomaly: {0}")]
    Anomaly(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
