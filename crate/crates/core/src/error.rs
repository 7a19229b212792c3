use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model error: {0}")]
    Model(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid payment willingness for ballot size {t}: {reason}")]
    Willingness { t: usize, reason: String },

    #[error("invalid rule specification `{0}`")]
    RuleSpec(String),

    #[error("instance too large: n = {n} exceeds limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("nash iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("rational grid 1/{denom} too coarse: {reason}")]
    GridTooCoarse { denom: u64, reason: String },

    #[error("trace does not belong to this profile: {0}")]
    TraceMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
