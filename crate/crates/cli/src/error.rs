use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("not an LPV-LFR: {0}")]
    NotLpvLfr(String),
    #[error(transparent)]
    Core(lpvlfr::Error),
}

impl From<lpvlfr::Error> for CliError {
    fn from(e: lpvlfr::Error) -> Self {
        match e {
            lpvlfr::Error::NotLpvLfr(msg) => CliError::NotLpvLfr(msg),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::NotLpvLfr(_) => 3,
            _ => 2,
        }
    }
}
