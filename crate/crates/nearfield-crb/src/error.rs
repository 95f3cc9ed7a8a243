use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrbError {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A scenario or numerics description is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// Evaluation produced a non-finite value or failed to converge.
    #[error("numerical failure: {message}{}", location.map(|(u, v)| format!(" at ({u:.6e}, {v:.6e})")).unwrap_or_default())]
    Numerical {
        message: String,
        location: Option<(f64, f64)>,
    },
    /// The requested combination is not defined (e.g. OSEF asymptotics).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl CrbError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CrbError::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CrbError::Config(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            CrbError::Domain(_) | CrbError::Config(_) | CrbError::Unsupported(_) => 2,
            CrbError::Numerical { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CrbError>;
