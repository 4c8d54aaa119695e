use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("net `{0}` has more than one driver")]
    MultipleDrivers(String),
    #[error("combinational cycle through gate {0}")]
    Cycle(u32),
    #[error("net `{0}` is read but never driven")]
    Dangling(String),
    #[error("gate {gate}: cell {cell} takes {expected} inputs, got {got}")]
    Arity {
        gate: u32,
        cell: String,
        expected: usize,
        got: usize,
    },
    #[error("missing value for primary input `{0}`")]
    MissingInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown report `{0}`")]
    UnknownReport(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
