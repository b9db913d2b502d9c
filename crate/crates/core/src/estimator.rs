use serde_json::Value;

use crate::data::{FeatureMatrix, LabelVector, ProbabilityMatrix};
use crate::error::{Error, Result};
use crate::snapshot::ModelSnapshot;

/// Behavioral contract shared by every classifier.
///
/// Estimators work on class indices; mapping to and from original labels
/// happens at the API boundary through a [`ClassSet`](crate::ClassSet).
/// `y.n_classes()` fixes the probability column count, so a model fit on a
/// subset that lacks some class still emits globally aligned columns.
pub trait Classifier: Send + Sync {
    /// Stable identifier of the estimator family, e.g. `"decision_tree"`.
    fn kind(&self) -> &'static str;

    fn fit(&mut self, x: &FeatureMatrix, y: &LabelVector) -> Result<()>;

    fn predict(&self, x: &FeatureMatrix) -> Result<LabelVector>;

    fn supports_proba(&self) -> bool {
        false
    }

    fn predict_proba(&self, _x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        Err(Error::NoProba)
    }

    fn is_fitted(&self) -> bool;

    /// Unfitted copy with identical hyperparameters and seed.
    fn fresh_clone(&self) -> Box<dyn Classifier>;

    /// Replaces the base seed. Deterministic estimators ignore it.
    fn reseed(&mut self, _seed: u64) {}

    fn hyperparameters(&self) -> Value;

    fn snapshot(&self) -> Result<ModelSnapshot>;
}

pub(crate) fn check_fit_inputs(x: &FeatureMatrix, y: &LabelVector) -> Result<()> {
    crate::data::validate_matrix(x)?;
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch {
            rows: x.n_rows(),
            labels: y.len(),
        });
    }
    if y.n_classes() < 2 {
        return Err(Error::DegenerateTarget);
    }
    Ok(())
}

pub(crate) fn check_predict_inputs(x: &FeatureMatrix, n_features: usize) -> Result<()> {
    crate::data::validate_matrix(x)?;
    if x.n_cols() != n_features {
        return Err(Error::DimensionMismatch {
            expected: n_features,
            found: x.n_cols(),
        });
    }
    Ok(())
}
