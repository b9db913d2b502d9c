use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("target has fewer than two distinct labels")]
    DegenerateTarget,

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },

    #[error("matrix has no rows or no columns")]
    EmptyMatrix,

    #[error("shape mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("label vector has {labels} entries but the matrix has {rows} rows")]
    LengthMismatch { rows: usize, labels: usize },

    #[error("class index {index} is out of range for {n_classes} classes")]
    InvalidClassIndex { index: usize, n_classes: usize },

    #[error("estimator is not fitted")]
    NotFitted,

    #[error("class counts sum to zero")]
    EmptyNode,

    #[error("class {class} has {count} members, fewer than the {folds} folds requested")]
    InsufficientClassMembers { class: usize, count: usize, folds: usize },

    #[error("class {0} has no training samples")]
    MissingClass(usize),

    #[error("estimator does not provide class probabilities")]
    NoProba,

    #[error("meta-estimator does not provide class probabilities")]
    MetaNoProba,

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("estimator cannot be serialized: {0}")]
    NotSerializable(String),
}
