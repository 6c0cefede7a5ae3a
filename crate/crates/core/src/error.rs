use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("theta stream exhausted its {cap}-bit cap without deciding a comparison")]
    ThetaCapExceeded { cap: usize },

    #[error("interval of node {0} contains no point")]
    EmptyInterval(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search exceeded {0} questions without terminating")]
    QuestionLimit(u64),

    #[error("exhaustive exploration exceeded its budget of {0} states")]
    ForkBudget(u64),

    #[error("state-space guard: {0}")]
    Guard(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidDistribution(e.to_string())
    }
}
