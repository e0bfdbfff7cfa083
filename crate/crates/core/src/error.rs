use thiserror::Error;

/// Errors produced by the counting, sampling and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a permutation of 1..{n}: {reason}")]
    InvalidPermutation { n: usize, reason: String },

    #[error("invalid inversion sequence: term {position} is {value}, must be below {position}")]
    InvalidCode { position: usize, value: usize },

    #[error("window starting at {start} of length {len} does not fit in a permutation of length {n}")]
    WindowOutOfRange { start: usize, len: usize, n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no permutation of length {n} has exactly {m} inversions")]
    EmptyClass { n: usize, m: u64 },

    #[error("rejection sampler gave up after {trials} trials")]
    TrialsExhausted { trials: u64 },

    #[error("exact computation needs {cells} cells, above the budget of {budget}")]
    BudgetExceeded { cells: u128, budget: u128 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
