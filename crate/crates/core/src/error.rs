use thiserror::Error;

/// Errors raised by lattice and wall computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (dimension mismatch, wrong square, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// An operation that needs a nondegenerate form was handed a degenerate one.
    #[error("degenerate lattice: {0}")]
    Degenerate(String),

    /// Missing session state, e.g. no reference positive class.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A class that was required to be off every wall lies on one.
    #[error("class lies on the wall orthogonal to {wall}")]
    OnWall { wall: String },

    /// Enumeration would exceed the configured cell budget.
    #[error("enumeration limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
