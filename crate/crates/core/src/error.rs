use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Out-of-range player or action, malformed profile, bad parameter.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Tensors, strategies or distributions whose dimensions disagree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("payoff out of range: {0}")]
    PayoffRange(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A subgame solver returned a distribution outside its subgame.
    #[error("solver contract violated: {0}")]
    SolverContract(String),

    /// Solver failure that must not happen on valid input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("game too large: {0}")]
    TooLarge(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn dim(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
