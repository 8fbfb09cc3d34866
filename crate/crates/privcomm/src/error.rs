use thiserror::Error;

/// Crate-wide error type. Variants are grouped by how callers should react:
/// `Validation` inputs can be fixed by the caller, `Resource` means a budget
/// was exceeded and a bigger budget (or a smaller instance) is needed,
/// `Numerical` means a computation left its reliable regime.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit code for the CLI: validation 2, resource 3, numerical 4.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch(_) | Error::InvalidState(_) | Error::InvalidArgument(_) => 2,
            Error::Resource(_) => 3,
            Error::Numerical(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
