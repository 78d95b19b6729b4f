use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("undefined AUC: scores need at least one positive and one negative label")]
    UndefinedAuc,

    #[error("cannot summarize an empty sample")]
    EmptySample,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid fold split: {0}")]
    InvalidSplit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("group {group} has {count} members, at least 2 are required")]
    GroupTooSmall { group: u8, count: usize },

    #[error("{solver} hit its iteration cap ({iterations})")]
    IterationCap {
        solver: &'static str,
        iterations: usize,
        /// Last iterate: slope weights followed by the intercept, when the solver has one.
        last: Vec<f64>,
    },

    #[error("every bootstrap iteration was skipped ({0} of {0}): single-class bag or out-of-bag set")]
    AllBootstrapsSkipped(usize),

    #[error("combiner {method} failed: {message}")]
    CombinerFailed { method: String, message: String },

    #[error("oracle unavailable: new-data estimates need the generating distribution")]
    OracleUnavailable,

    #[error("csv {path}:{line}: {message}")]
    Csv {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("refusing to emit a report with no records")]
    EmptyReport,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
