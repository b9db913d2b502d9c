use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid registry manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("dataset `{id}`: file not found: {path}")]
    MissingFile { id: String, path: PathBuf },

    #[error("duplicate dataset id `{0}` in registry")]
    DuplicateId(String),

    #[error("dataset `{dataset}`: column `{column}` is not in {path}")]
    UnknownColumn {
        dataset: String,
        column: String,
        path: PathBuf,
    },

    #[error("{path}: malformed CSV: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("{0}: file has no data rows")]
    EmptyFile(PathBuf),

    #[error("{path}: row {row}, column `{column}`: cannot parse `{value}` as a number")]
    UnparseableCell {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: row {row}: target column `{column}` is blank")]
    BlankTarget {
        path: PathBuf,
        row: usize,
        column: String,
    },

    #[error("{path}: target column `{column}`: {source}")]
    Target {
        path: PathBuf,
        column: String,
        #[source]
        source: tabstack::Error,
    },

    #[error("model `{model}` on dataset `{dataset}`{}: {source}", fold.map(|k| format!(", fold {k}")).unwrap_or_default())]
    Model {
        model: String,
        dataset: String,
        fold: Option<usize>,
        #[source]
        source: tabstack::Error,
    },

    #[error("invalid protocol: {0}")]
    Protocol(String),

    #[error("dataset `{dataset}` has only {count} scored model(s); normalization needs at least 2")]
    TooFewModels { dataset: String, count: usize },

    #[error("no score for model `{model}` on dataset `{dataset}`")]
    IncompleteGrid { model: String, dataset: String },

    #[error("unknown model id `{0}`")]
    UnknownModel(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("model artifact format version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("invalid model artifact: {0}")]
    Artifact(String),

    #[error(transparent)]
    Core(#[from] tabstack::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub(crate) fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> BenchError {
    let path = path.into();
    move |source| BenchError::Io { path, source }
}
