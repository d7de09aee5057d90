use thiserror::Error;

pub type Result<T> = std::result::Result<T, BboError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BboError {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("observation shape mismatch: expected {expected_objectives} objectives and {expected_constraints} constraints, got {objectives} and {constraints}")]
    ObservationShape {
        expected_objectives: usize,
        expected_constraints: usize,
        objectives: usize,
        constraints: usize,
    },
    #[error("invalid observation: {0}")]
    InvalidObservation(String),
    #[error("wrong task type: {0}")]
    WrongTaskType(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("search space exhausted: every configuration has already been suggested")]
    ExhaustedSpace,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("population size error: {0}")]
    PopulationSize(String),
    #[error("setup error: {0}")]
    Setup(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl BboError {
    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        BboError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
