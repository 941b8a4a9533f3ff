use thiserror::Error;

/// Errors raised by the library. Nonconvergence of the solver is not an
/// error; it is reported through [`crate::vortex::SolveReport`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("form type mismatch: expected {expected}, got {got}")]
    FormType { expected: String, got: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("resolution out of range: {0}")]
    Resolution(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
