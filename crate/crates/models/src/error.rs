use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("function is not real: {0}")]
    NotReal(String),
    #[error("structure solve is inconsistent: {0}")]
    SolverDegenerate(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("cannot integrate: {0}")]
    Integration(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("symbol `{0}` has no value on the model")]
    Unbound(String),
    #[error(transparent)]
    Core(#[from] crq_core::Error),
}

pub type Result<T> = std::result::Result<T, ModelError>;
