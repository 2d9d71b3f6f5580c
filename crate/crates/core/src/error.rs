use thiserror::Error;

/// Errors raised across mesh construction, discretisation, assembly and solves.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate geometry: {0}")]
    Geometry(String),
    #[error("point outside reference domain: {0}")]
    Domain(String),
    #[error("unsupported capability: {0}")]
    Capability(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("linear solver failure: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
