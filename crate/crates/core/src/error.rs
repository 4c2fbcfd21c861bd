use std::io;

/// Errors produced by model construction, diagonalization and the analysis pipelines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value out of range: {0}")]
    Range(String),

    /// The eigensolver failed or produced eigenpairs that do not satisfy `H v = E v`.
    #[error("computation failed: {message} (residual {residual:.3e})")]
    Computation { message: String, residual: f64 },

    /// The coarse scan put the maximum on the edge of the search window.
    #[error("peak not bracketed: maximum at q = {q} on the edge of [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64, q: f64 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
