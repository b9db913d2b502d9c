//! Cross-validated accuracy of one model prototype on one dataset.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tabstack::{derive_seed, stratified_folds, Classifier, SeedSpec};

use crate::error::{BenchError, Result};
use crate::ingest::EncodedDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalProtocol {
    pub folds: usize,
    pub seed: SeedSpec,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        Self {
            folds: 5,
            seed: SeedSpec::absent(),
        }
    }
}

impl EvalProtocol {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(BenchError::Protocol(format!("folds must be at least 2, got {}", self.folds)));
        }
        Ok(())
    }
}

/// First eight bytes of SHA-256, big-endian.
pub fn stable_hash(id: &str) -> u64 {
    let digest = Sha256::digest(id.as_bytes());
    u64::from_be_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// Seed shared by every model on a dataset; it fixes the fold split, so
/// all models are compared on the same partitions.
pub fn dataset_seed(base: u64, dataset_id: &str) -> u64 {
    derive_seed(base, stable_hash(dataset_id))
}

/// Seed of one (model, dataset) cell; fold `k` fits with
/// `derive_seed(cell_seed, k)`.
pub fn cell_seed(base: u64, model_id: &str, dataset_id: &str) -> u64 {
    derive_seed(dataset_seed(base, dataset_id), stable_hash(model_id))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellScore {
    /// Unweighted mean of the fold accuracies.
    pub accuracy: f64,
    pub fold_accuracies: Vec<f64>,
    pub fold_seed: u64,
    pub model_seed: u64,
}

/// Stratified k-fold accuracy. Each fold fits a fresh clone of `prototype`
/// on the training part and scores the held-out part.
pub fn evaluate_model_on_dataset(
    model_id: &str,
    prototype: &dyn Classifier,
    data: &EncodedDataset,
    protocol: &EvalProtocol,
) -> Result<CellScore> {
    protocol.validate()?;
    let base = protocol.seed.resolve();
    let fold_seed = dataset_seed(base, &data.id);
    let model_seed = cell_seed(base, model_id, &data.id);
    let annotate = |fold: Option<usize>| {
        let (model, dataset) = (model_id.to_owned(), data.id.clone());
        move |source| BenchError::Model {
            model,
            dataset,
            fold,
            source,
        }
    };

    let folds = stratified_folds(&data.y, protocol.folds, fold_seed).map_err(annotate(None))?;
    let mut fold_accuracies = Vec::with_capacity(protocol.folds);
    for k in 0..protocol.folds {
        let (train, test) = (folds.train_rows(k), folds.test_rows(k));
        let mut model = prototype.fresh_clone();
        model.reseed(derive_seed(model_seed, k as u64));
        model
            .fit(&data.x.select_rows(&train), &data.y.select(&train))
            .map_err(annotate(Some(k)))?;
        let pred = model.predict(&data.x.select_rows(&test)).map_err(annotate(Some(k)))?;
        fold_accuracies.push(pred.accuracy(&data.y.select(&test)));
    }
    let accuracy = fold_accuracies.iter().sum::<f64>() / protocol.folds as f64;
    Ok(CellScore {
        accuracy,
        fold_accuracies,
        fold_seed,
        model_seed,
    })
}
