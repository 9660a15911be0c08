use thiserror::Error;

/// Errors raised by the collocation, finite-element and allocation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index set is not downward closed: {0}")]
    NotDownwardClosed(String),

    #[error("point {point:?} lies outside the parameter box [-1, 1]^N")]
    OutsideDomain { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("root bracketing failed: {0}")]
    RootBracketing(String),

    #[error("non-positive coefficient {value} sampled at element {element}")]
    NonPositiveCoefficient { value: f64, element: usize },

    #[error("linear solver did not converge: {0}")]
    SolverFailure(String),

    #[error("sample {sample} on level {level} failed: {source}")]
    Sample {
        level: usize,
        sample: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("constant estimation failed: {0}")]
    Estimation(String),

    #[error("adaptive driver exceeded {max_levels} levels: {diagnostics}")]
    MaxLevelsExceeded {
        max_levels: usize,
        diagnostics: String,
    },

    #[error("configuration error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
