use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] incentive_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Write(#[source] io::Error),
    /// A document that parsed but does not describe a valid object.
    #[error("{location}: {message}")]
    Schema { location: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    /// Malformed line in one of the text formats.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid sweep: {0}")]
    Sweep(String),
    /// An entropy rate above the theoretical maximum, which can only be a
    /// bug.
    #[error("entropy rate {rate} exceeds the bound {bound} at grid point {point}")]
    BoundViolation { point: usize, rate: f64, bound: f64 },
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) if e.is_numerical() => 2,
            Error::BoundViolation { .. } => 2,
            _ => 1,
        }
    }
}
