use thiserror::Error;

/// Errors returned across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A function was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Geometric input is degenerate (coplanar, duplicate, flat cell).
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    /// A quantity is infinite for the requested parameters.
    #[error("divergent quantity: {0}")]
    Divergent(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// A root bracket or solve failed.
    #[error("solver failure: {0}")]
    Solver(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
