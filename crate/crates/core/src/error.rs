use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {n} is outside the supported range 1..=63")]
    Dimension { n: usize },

    #[error("value {value} does not fit in {n} bits")]
    WordOverflow { value: u64, n: usize },

    #[error("coordinate index {d} out of range for dimension {n}")]
    CoordinateIndex { d: usize, n: usize },

    #[error("coordinate {value} at axis {axis} is outside [0, 1)")]
    CoordinateRange { axis: usize, value: f64 },

    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("bucket capacity must be at least 1")]
    ZeroCapacity,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no non-empty leaves; omega is undefined")]
    NoNonEmptyLeaves,

    #[error("local sparsity measure {value} falls outside [0, 1]")]
    RhoOutOfRange { value: f64 },

    #[error("sample error: {0}")]
    Sample(String),

    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}`")]
    Parse {
        row: u64,
        column: String,
        value: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
