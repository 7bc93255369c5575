use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{what} is singular (|value| = {magnitude:e})")]
    Singular { what: &'static str, magnitude: f64 },

    #[error("non-finite value in {0}")]
    Overflow(&'static str),

    #[error("window does not intersect the spectrum (T + H = 0)")]
    EmptyWindow,

    #[error("no half-maximum crossing inside the sampled range")]
    NoCrossing,

    #[error("norm blow-up: {norm} at t = {time}")]
    NormBlowUp { norm: f64, time: f64 },

    #[error("{0}")]
    Numerical(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Bad input as opposed to a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Invalid { .. } | Error::Parse { .. } | Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
