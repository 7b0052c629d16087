use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("conductor {given} is not minimal: true conductor {true_conductor}")]
    NonMinimalConductor { given: u64, true_conductor: u64 },
    #[error("field is not real: -1 is not in the fixing subgroup")]
    NotReal,
    #[error("{0} is ramified")]
    Ramified(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("precision collapse: {0}")]
    PrecisionCollapse(String),
    #[error("factorization bound exceeded: {0}")]
    FactorizationBound(String),
    #[error("rank defect: {0}")]
    RankDefect(String),
    #[error("effort budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("THEOREM VIOLATION (check implementation): {0}")]
    TheoremViolation(String),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded(_) => 3,
            Error::RankDefect(_) | Error::BudgetExhausted(_) | Error::FactorizationBound(_) => 4,
            Error::TheoremViolation(_) => 5,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
