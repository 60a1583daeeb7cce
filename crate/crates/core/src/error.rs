use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    /// A structural check failed while loading; `witness` names the offending basis data.
    #[error("validation failed [{check}]: {witness}")]
    Validation { check: String, witness: String },
    #[error("module is not finitely generated projective: {0}")]
    NotProjective(String),
    #[error("duality identity fails at {0}")]
    DualityFailure(String),
    #[error("module `{0}` has no bimodule structure map")]
    SigmaRequired(String),
    #[error("braiding of `{0}` is not invertible")]
    SigmaNotInvertible(String),
    #[error("degree {requested} exceeds the truncation degree {limit}")]
    TruncationExceeded { requested: usize, limit: usize },
    #[error("operator degree {requested} exceeds the configured degree {limit}")]
    DegreeExceeded { requested: usize, limit: usize },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("inner product is not positive: {0}")]
    PositivityFailure(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn validation(check: &str, witness: impl Into<String>) -> Error {
        Error::Validation { check: check.to_string(), witness: witness.into() }
    }
}
