//! Meta-synthesis classifier: stacked generalization over heterogeneous base
//! learners.
//!
//! Training builds out-of-fold meta-features: for every fold `k` and base
//! prototype `j`, a fresh clone of `j` is fit on the rows outside fold `k`
//! and predicts the rows inside it. The meta-estimator learns from those
//! features, while the bases used at inference are refit on all rows.
//!
//! Meta-feature layout, left to right: the original features (when
//! `use_original_features`), then one block per base estimator in config
//! order. A block holds `|C|` class-aligned probability columns when
//! `use_probas` is set and the base supports probabilities, otherwise a
//! single column with the predicted class index.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{FeatureMatrix, LabelVector, ProbabilityMatrix};
use crate::error::{Error, Result};
use crate::estimator::{check_fit_inputs, check_predict_inputs, Classifier};
use crate::folds::stratified_folds;
use crate::learners::forest::RandomForest;
use crate::learners::logistic::{LogisticConfig, LogisticRegression};
use crate::learners::tree::DecisionTree;
use crate::seed::{derive_seed, SeedSpec};
use crate::snapshot::ModelSnapshot;

const FOLD_STREAM: u64 = 0;
const META_STREAM: u64 = 1;
const FIRST_BASE_STREAM: u64 = 2;
/// Under a base estimator's stream: 0 for the full refit, `1 + k` for fold `k`.
const FULL_FIT_STREAM: u64 = 0;

pub struct StackingConfig {
    pub base_estimators: Vec<Box<dyn Classifier>>,
    pub meta_estimator: Box<dyn Classifier>,
    pub cv: usize,
    pub use_probas: bool,
    pub use_original_features: bool,
    pub seed: SeedSpec,
}

impl Default for StackingConfig {
    fn default() -> Self {
        let logistic = || {
            Box::new(LogisticRegression::new(LogisticConfig {
                max_iter: 1000,
                ..LogisticConfig::default()
            })) as Box<dyn Classifier>
        };
        Self {
            base_estimators: vec![
                logistic(),
                Box::new(RandomForest::new(100, SeedSpec::absent())),
                Box::new(DecisionTree::default()),
            ],
            meta_estimator: logistic(),
            cv: 5,
            use_probas: true,
            use_original_features: false,
            seed: SeedSpec::absent(),
        }
    }
}

impl Clone for StackingConfig {
    fn clone(&self) -> Self {
        Self {
            base_estimators: self.base_estimators.iter().map(|b| b.fresh_clone()).collect(),
            meta_estimator: self.meta_estimator.fresh_clone(),
            cv: self.cv,
            use_probas: self.use_probas,
            use_original_features: self.use_original_features,
            seed: self.seed,
        }
    }
}

impl fmt::Debug for StackingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StackingConfig")
            .field(
                "base_estimators",
                &self.base_estimators.iter().map(|b| b.kind()).collect::<Vec<_>>(),
            )
            .field("meta_estimator", &self.meta_estimator.kind())
            .field("cv", &self.cv)
            .field("use_probas", &self.use_probas)
            .field("use_original_features", &self.use_original_features)
            .field("seed", &self.seed)
            .finish()
    }
}

impl StackingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cv < 2 {
            return Err(Error::InvalidHyperparameter(format!(
                "cv must be at least 2, got {}",
                self.cv
            )));
        }
        if self.base_estimators.is_empty() {
            return Err(Error::InvalidHyperparameter(
                "at least one base estimator is required".into(),
            ));
        }
        Ok(())
    }

    fn emits_proba(&self, base: &dyn Classifier) -> bool {
        self.use_probas && base.supports_proba()
    }

    fn layout(&self, n_features: usize, n_classes: usize) -> Vec<MetaBlock> {
        let mut blocks = Vec::new();
        if self.use_original_features {
            blocks.push(MetaBlock {
                kind: BlockKind::OriginalFeatures,
                estimator: None,
                width: n_features,
            });
        }
        for (j, base) in self.base_estimators.iter().enumerate() {
            let proba = self.emits_proba(base.as_ref());
            blocks.push(MetaBlock {
                kind: if proba {
                    BlockKind::Probabilities
                } else {
                    BlockKind::ClassIndex
                },
                estimator: Some(j),
                width: if proba { n_classes } else { 1 },
            });
        }
        blocks
    }
}

fn base_stream(base_seed: u64, estimator: usize) -> u64 {
    derive_seed(base_seed, FIRST_BASE_STREAM + estimator as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    OriginalFeatures,
    Probabilities,
    ClassIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaBlock {
    pub kind: BlockKind,
    /// Base estimator position, `None` for the original-feature block.
    pub estimator: Option<usize>,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaFeatureMatrix {
    pub values: FeatureMatrix,
    pub blocks: Vec<MetaBlock>,
}

impl MetaFeatureMatrix {
    pub fn width(&self) -> usize {
        self.values.n_cols()
    }
}

/// Writes one base estimator's output for `rows` into its block.
fn base_output(
    model: &dyn Classifier,
    x: &FeatureMatrix,
    proba: bool,
) -> Result<Vec<f64>> {
    if proba {
        Ok(model.predict_proba(x)?.values().to_vec())
    } else {
        Ok(model.predict(x)?.indices().iter().map(|&c| c as f64).collect())
    }
}

fn estimator_blocks(config: &StackingConfig, blocks: &[MetaBlock]) -> Vec<(usize, usize, usize)> {
    // (estimator, column offset within the base section, width)
    let mut offset = 0;
    blocks
        .iter()
        .filter_map(|b| {
            let j = b.estimator?;
            let entry = (j, offset, b.width);
            offset += b.width;
            debug_assert!(j < config.base_estimators.len());
            Some(entry)
        })
        .collect()
}

/// Out-of-fold meta-features for every training row, rows in input order.
pub fn oof_meta_features(
    x: &FeatureMatrix,
    y: &LabelVector,
    config: &StackingConfig,
) -> Result<MetaFeatureMatrix> {
    check_fit_inputs(x, y)?;
    config.validate()?;
    oof_with_seed(x, y, config, config.seed.resolve())
}

fn oof_with_seed(
    x: &FeatureMatrix,
    y: &LabelVector,
    config: &StackingConfig,
    seed: u64,
) -> Result<MetaFeatureMatrix> {
    let folds = stratified_folds(y, config.cv, derive_seed(seed, FOLD_STREAM))?;
    let blocks = config.layout(x.n_cols(), y.n_classes());
    let placement = estimator_blocks(config, &blocks);
    let base_width: usize = placement.iter().map(|p| p.2).sum();

    let cells: Vec<(usize, usize)> = (0..config.cv)
        .flat_map(|k| (0..config.base_estimators.len()).map(move |j| (k, j)))
        .collect();
    let outputs: Vec<Result<(Vec<usize>, Vec<f64>)>> = cells
        .par_iter()
        .map(|&(k, j)| {
            let prototype = &config.base_estimators[j];
            let train = folds.train_rows(k);
            let test = folds.test_rows(k);
            let mut model = prototype.fresh_clone();
            model.reseed(derive_seed(base_stream(seed, j), 1 + k as u64));
            model.fit(&x.select_rows(&train), &y.select(&train))?;
            let out = base_output(
                model.as_ref(),
                &x.select_rows(&test),
                config.emits_proba(prototype.as_ref()),
            )?;
            Ok((test, out))
        })
        .collect();

    let mut base = FeatureMatrix::zeros(x.n_rows(), base_width);
    for (&(_, j), output) in cells.iter().zip(outputs) {
        let (test, values) = output?;
        let (_, offset, width) = placement[j];
        for (t, &row) in test.iter().enumerate() {
            base.row_mut(row)[offset..offset + width]
                .copy_from_slice(&values[t * width..(t + 1) * width]);
        }
    }

    let values = if config.use_original_features {
        FeatureMatrix::hstack(&[x, &base])?
    } else {
        base
    };
    Ok(MetaFeatureMatrix { values, blocks })
}

struct StackFit {
    bases: Vec<Box<dyn Classifier>>,
    meta: Box<dyn Classifier>,
    blocks: Vec<MetaBlock>,
    n_features: usize,
    n_classes: usize,
}

#[derive(Default)]
pub struct MetaSynthesis {
    pub config: StackingConfig,
    fitted: Option<StackFit>,
}

impl MetaSynthesis {
    pub fn new(config: StackingConfig) -> Self {
        Self { config, fitted: None }
    }

    /// Meta-feature layout of the fitted model.
    pub fn blocks(&self) -> Option<&[MetaBlock]> {
        self.fitted.as_ref().map(|f| f.blocks.as_slice())
    }

    pub fn meta_estimator(&self) -> Option<&dyn Classifier> {
        self.fitted.as_ref().map(|f| f.meta.as_ref())
    }

    pub fn base_estimators(&self) -> Option<&[Box<dyn Classifier>]> {
        self.fitted.as_ref().map(|f| f.bases.as_slice())
    }

    /// Inference-time meta-features, built by the bases refit on all rows.
    pub fn meta_features(&self, x: &FeatureMatrix) -> Result<MetaFeatureMatrix> {
        let fit = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        check_predict_inputs(x, fit.n_features)?;
        let placement = estimator_blocks(&self.config, &fit.blocks);
        let mut parts = Vec::with_capacity(placement.len() + 1);
        if self.config.use_original_features {
            parts.push(x.clone());
        }
        for &(j, _, width) in &placement {
            let proba = fit.blocks.iter().any(|b| {
                b.estimator == Some(j) && b.kind == BlockKind::Probabilities
            });
            let values = base_output(fit.bases[j].as_ref(), x, proba)?;
            parts.push(FeatureMatrix::new(x.n_rows(), width, values)?);
        }
        let refs: Vec<&FeatureMatrix> = parts.iter().collect();
        Ok(MetaFeatureMatrix {
            values: FeatureMatrix::hstack(&refs)?,
            blocks: fit.blocks.clone(),
        })
    }

    pub(crate) fn from_parts(
        config: StackingConfig,
        fitted: Option<(Vec<Box<dyn Classifier>>, Box<dyn Classifier>, Vec<MetaBlock>, usize, usize)>,
    ) -> Self {
        Self {
            config,
            fitted: fitted.map(|(bases, meta, blocks, n_features, n_classes)| StackFit {
                bases,
                meta,
                blocks,
                n_features,
                n_classes,
            }),
        }
    }
}

impl fmt::Debug for MetaSynthesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetaSynthesis")
            .field("config", &self.config)
            .field("fitted", &self.fitted.is_some())
            .finish()
    }
}

impl Classifier for MetaSynthesis {
    fn kind(&self) -> &'static str {
        "meta_synthesis"
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &LabelVector) -> Result<()> {
        check_fit_inputs(x, y)?;
        self.config.validate()?;
        let seed = self.config.seed.resolve();
        let meta_features = oof_with_seed(x, y, &self.config, seed)?;

        let bases = self
            .config
            .base_estimators
            .par_iter()
            .enumerate()
            .map(|(j, prototype)| {
                let mut model = prototype.fresh_clone();
                model.reseed(derive_seed(base_stream(seed, j), FULL_FIT_STREAM));
                model.fit(x, y)?;
                Ok(model)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut meta = self.config.meta_estimator.fresh_clone();
        meta.reseed(derive_seed(seed, META_STREAM));
        meta.fit(&meta_features.values, y)?;

        self.fitted = Some(StackFit {
            bases,
            meta,
            blocks: meta_features.blocks,
            n_features: x.n_cols(),
            n_classes: y.n_classes(),
        });
        Ok(())
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<LabelVector> {
        let z = self.meta_features(x)?;
        self.fitted.as_ref().ok_or(Error::NotFitted)?.meta.predict(&z.values)
    }

    fn supports_proba(&self) -> bool {
        self.config.meta_estimator.supports_proba()
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        let fit = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        if !fit.meta.supports_proba() {
            return Err(Error::MetaNoProba);
        }
        let z = self.meta_features(x)?;
        fit.meta.predict_proba(&z.values)
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fresh_clone(&self) -> Box<dyn Classifier> {
        Box::new(Self::new(self.config.clone()))
    }

    fn reseed(&mut self, seed: u64) {
        self.config.seed = SeedSpec::fixed(seed);
    }

    fn hyperparameters(&self) -> Value {
        let describe = |c: &dyn Classifier| json!({ "kind": c.kind(), "params": c.hyperparameters() });
        json!({
            "cv": self.config.cv,
            "use_probas": self.config.use_probas,
            "use_original_features": self.config.use_original_features,
            "seed": self.config.seed,
            "base_estimators": self.config.base_estimators.iter().map(|b| describe(b.as_ref())).collect::<Vec<_>>(),
            "meta_estimator": describe(self.config.meta_estimator.as_ref()),
        })
    }

    fn snapshot(&self) -> Result<ModelSnapshot> {
        Ok(ModelSnapshot::MetaSynthesis(Box::new(
            crate::snapshot::MetaSynthesisSnapshot::capture(self, self.fitted.as_ref().map(|f| {
                (&f.bases[..], f.meta.as_ref(), &f.blocks[..], f.n_features, f.n_classes)
            }))?,
        )))
    }
}
