//! Test-only oracles and data generators. Nothing here shares code paths
//! with the estimators it is used to check.

pub mod datasets;
pub mod memorizer;
pub mod perceptron;
pub mod tree_oracle;

pub use memorizer::Memorizer;

/// Result of one acceptance check.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn pass(detail: impl Into<String>) -> Self {
        Self {
            passed: true,
            detail: detail.into(),
        }
    }

    pub fn fail(detail: impl Into<String>) -> Self {
        Self {
            passed: false,
            detail: detail.into(),
        }
    }
}
