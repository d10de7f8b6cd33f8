use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error at {location}: {message}")]
    Validation { location: String, message: String },

    #[error("field belongs to a different mesh")]
    MeshMismatch,

    #[error("no solution detected after {iterations} iterations (residual {residual:.3e})")]
    NoSolutionDetected { iterations: usize, residual: f64 },

    #[error("maximum iterations ({iterations}) reached with residual {residual:.3e}")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("bound inapplicable: {0}")]
    BoundInapplicable(String),

    #[error("foliation undefined beyond the weakly almost Fuchsian range (lambda0 = {0})")]
    FoliationUndefinedBeyondWaf(f64),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("ray point {index} (t = {t}): {source}")]
    Ray {
        index: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("threshold out of range: {0}")]
    ThresholdOutOfRange(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            location: location.into(),
            message: message.into(),
        }
    }

    /// True when the error (possibly wrapped in a ray context) is a no-solution diagnosis.
    pub fn is_no_solution(&self) -> bool {
        match self {
            Error::NoSolutionDetected { .. } => true,
            Error::Ray { source, .. } => source.is_no_solution(),
            _ => false,
        }
    }

    pub fn is_validation(&self) -> bool {
        match self {
            Error::Validation { .. } | Error::MeshMismatch | Error::Json(_) => true,
            Error::Ray { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
