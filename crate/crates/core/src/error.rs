use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` takes {expected} indices, got {got}")]
    WrongArity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("index kind mismatch on `{0}`")]
    KindMismatch(String),
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(String, String),
    #[error("free index mismatch: {0} vs {1}")]
    FreeIndexMismatch(String, String),
    #[error("index `{0}` must appear once upper and once lower")]
    UnbalancedDummy(String),
    #[error("pole of order {order} at n = {at}")]
    PoleAtLimit { at: String, order: usize },
    #[error("conformal rule for rank {0} objects is not available: {1}")]
    UnsupportedRank(usize, String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("side condition failed: {0}")]
    SideConditionFailed(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
