use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot sample from a support of zero measure")]
    EmptySupport,

    #[error("{what} = {value} is below the validity floor {floor}")]
    BelowValidityFloor {
        what: &'static str,
        value: f64,
        floor: f64,
    },

    #[error("breakpoint {breakpoint} is not a multiple of the grid step {step}")]
    GridMisaligned { breakpoint: f64, step: f64 },

    #[error("candidate budget of {0} exhausted before termination")]
    BudgetExhausted(u64),

    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
