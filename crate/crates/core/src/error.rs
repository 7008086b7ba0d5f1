use thiserror::Error;

/// Errors raised by model construction and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("structurally invalid model: {0}")]
    Structure(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("letter {letter} outside alphabet 1..={alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },

    #[error("model is not an LPV-LFR: {0}")]
    NotLpvLfr(String),

    #[error("factor pair {index} does not reproduce its coefficient block (residual {residual:e})")]
    FactorMismatch { index: usize, residual: f64 },

    #[error("singular transformation: {0}")]
    Singular(String),

    #[error("invalid parametrization sample: {0}")]
    Sample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
