use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("configuration conflict: {0}")]
    ConfigConflict(String),

    #[error("singular effective channel (condition number {condition:.3e})")]
    SingularEffectiveChannel { condition: f64 },

    #[error("exhaustive search needs {combinations} evaluations, budget is {budget}")]
    OracleBudgetExceeded { combinations: u128, budget: u64 },

    #[error("codebook log of user {user} is empty at AP {ap}")]
    BccExhausted { ap: usize, user: usize },

    #[error("invalid beam assignment: {0}")]
    InvalidAssignment(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("teacher failed on dataset row {row}: {source}")]
    Teacher {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
