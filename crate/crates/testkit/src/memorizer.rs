use std::collections::HashSet;

use serde_json::{json, Value};
use tabstack::{Classifier, Error, FeatureMatrix, LabelVector, ModelSnapshot, Result};

/// Predicts class 1 for rows that were in its training set (bit-exact match)
/// and class 0 otherwise. Used as a stacking base to detect leakage: every
/// out-of-fold prediction must be 0.
#[derive(Debug, Default, Clone)]
pub struct Memorizer {
    seen: Option<HashSet<Vec<u64>>>,
    n_classes: usize,
}

fn key(row: &[f64]) -> Vec<u64> {
    row.iter().map(|v| v.to_bits()).collect()
}

impl Classifier for Memorizer {
    fn kind(&self) -> &'static str {
        "memorizer"
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &LabelVector) -> Result<()> {
        self.seen = Some(x.rows().map(key).collect());
        self.n_classes = y.n_classes();
        Ok(())
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<LabelVector> {
        let seen = self.seen.as_ref().ok_or(Error::NotFitted)?;
        let out = x.rows().map(|r| usize::from(seen.contains(&key(r)))).collect();
        LabelVector::new(out, self.n_classes)
    }

    fn is_fitted(&self) -> bool {
        self.seen.is_some()
    }

    fn fresh_clone(&self) -> Box<dyn Classifier> {
        Box::new(Memorizer::default())
    }

    fn hyperparameters(&self) -> Value {
        json!({})
    }

    fn snapshot(&self) -> Result<ModelSnapshot> {
        Err(Error::NotSerializable("memorizer is a test oracle".into()))
    }
}
