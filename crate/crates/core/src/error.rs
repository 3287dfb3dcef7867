use std::path::PathBuf;

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("degenerate field: average document length is zero for {field}")]
    DegenerateField { field: &'static str },

    #[error("invalid grade {0}: expected one of -2, 0, 1, 2, 3, 4")]
    InvalidGrade(i64),

    #[error("{file}:{line}: {message}")]
    ParseAt {
        file: String,
        line: usize,
        message: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-dense feature ids: expected feature {expected}, found {found}")]
    NonDenseFeatureIds { expected: usize, found: usize },

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("need at least 5 queries to build folds, got {0}")]
    TooFewQueries(usize),

    #[error("fold index {0} out of range 0..5")]
    FoldOutOfRange(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("feature vector has stage {found:?}, expected {expected:?}")]
    WrongStage {
        expected: crate::features::FeatureStage,
        found: crate::features::FeatureStage,
    },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("not a vector file: bad magic")]
    BadVectorMagic,

    #[error("not a model checkpoint: bad magic")]
    BadCheckpointMagic,

    #[error("truncated file: {0}")]
    Truncated(String),

    #[error("invalid architecture spec: {0}")]
    InvalidSpec(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("no training signal: no preference pairs")]
    NoTrainingSignal,

    #[error("missing visual vector for document {0}")]
    MissingVector(String),

    #[error("missing features for query {query_id} document {doc_id}")]
    MissingFeatures { query_id: String, doc_id: String },

    #[error("run files cover different query sets: {0}")]
    QuerySetMismatch(String),

    #[error("paired t-test needs at least 2 paired values, got {0}")]
    TooFewSamples(usize),

    #[error("degenerate: identical variance")]
    DegenerateVariance,

    #[error("{path}: {source}")]
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

    /// Attach a file name and line number to a bare parse error.
    pub(crate) fn at(self, file: &str, line: usize) -> Self {
        match self {
            Error::ParseAt { .. } => self,
            other => Error::ParseAt {
                file: file.to_string(),
                line,
                message: other.to_string(),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
