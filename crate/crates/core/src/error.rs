use thiserror::Error;

/// Errors raised by graph construction, simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node {id} out of range for graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(usize),

    #[error("graph is empty")]
    EmptyGraph,

    #[error("edge visibility already assigned")]
    AlreadyLabeled,

    #[error("degenerate value: {0}")]
    Degenerate(String),

    #[error("integration unstable at t = {t}: density {value} out of range, reduce dt")]
    Unstable { t: f64, value: f64 },

    #[error("fixed-point iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
