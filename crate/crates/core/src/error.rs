use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed header: {0}")]
    Header(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("feature `{0}` has no observed value in the fit rows")]
    EmptyFeature(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: model expects {expected} features, row has {got}")]
    Dimension { expected: usize, got: usize },

    #[error("training failed: {0}")]
    Training(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures raised while fitting a model (possibly inside a fold).
    pub fn is_training(&self) -> bool {
        match self {
            Error::Training(_) => true,
            Error::Fold { source, .. } => source.is_training(),
            _ => false,
        }
    }
}
