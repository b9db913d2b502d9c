//! Serializable state of every built-in estimator, fitted or not.

use serde::{Deserialize, Serialize};

use crate::directional::DirectionalForest;
use crate::error::{Error, Result};
use crate::estimator::Classifier;
use crate::learners::forest::RandomForest;
use crate::learners::logistic::LogisticRegression;
use crate::learners::tree::DecisionTree;
use crate::metasynthesis::{MetaBlock, MetaSynthesis, StackingConfig};
use crate::seed::SeedSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "state", rename_all = "snake_case")]
pub enum ModelSnapshot {
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    LogisticRegression(LogisticRegression),
    DirectionalForest(DirectionalForest),
    MetaSynthesis(Box<MetaSynthesisSnapshot>),
}

impl ModelSnapshot {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelSnapshot::DecisionTree(_) => "decision_tree",
            ModelSnapshot::RandomForest(_) => "random_forest",
            ModelSnapshot::LogisticRegression(_) => "logistic_regression",
            ModelSnapshot::DirectionalForest(_) => "directional_forest",
            ModelSnapshot::MetaSynthesis(_) => "meta_synthesis",
        }
    }

    pub fn restore(self) -> Result<Box<dyn Classifier>> {
        Ok(match self {
            ModelSnapshot::DecisionTree(m) => Box::new(m),
            ModelSnapshot::RandomForest(m) => Box::new(m),
            ModelSnapshot::LogisticRegression(m) => Box::new(m),
            ModelSnapshot::DirectionalForest(m) => Box::new(m),
            ModelSnapshot::MetaSynthesis(s) => Box::new(s.restore()?),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetaSynthesisSnapshot {
    pub cv: usize,
    pub use_probas: bool,
    pub use_original_features: bool,
    pub seed: SeedSpec,
    pub base_estimators: Vec<ModelSnapshot>,
    pub meta_estimator: ModelSnapshot,
    pub fitted: Option<FittedStackSnapshot>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedStackSnapshot {
    pub bases: Vec<ModelSnapshot>,
    pub meta: ModelSnapshot,
    pub blocks: Vec<MetaBlock>,
    pub n_features: usize,
    pub n_classes: usize,
}

type FittedParts<'a> = (&'a [Box<dyn Classifier>], &'a dyn Classifier, &'a [MetaBlock], usize, usize);

impl MetaSynthesisSnapshot {
    pub(crate) fn capture(model: &MetaSynthesis, fitted: Option<FittedParts<'_>>) -> Result<Self> {
        let config = &model.config;
        let fitted = match fitted {
            Some((bases, meta, blocks, n_features, n_classes)) => Some(FittedStackSnapshot {
                bases: bases.iter().map(|b| b.snapshot()).collect::<Result<_>>()?,
                meta: meta.snapshot()?,
                blocks: blocks.to_vec(),
                n_features,
                n_classes,
            }),
            None => None,
        };
        Ok(Self {
            cv: config.cv,
            use_probas: config.use_probas,
            use_original_features: config.use_original_features,
            seed: config.seed,
            base_estimators: config
                .base_estimators
                .iter()
                .map(|b| b.snapshot())
                .collect::<Result<_>>()?,
            meta_estimator: config.meta_estimator.snapshot()?,
            fitted,
        })
    }

    pub fn restore(self) -> Result<MetaSynthesis> {
        let config = StackingConfig {
            base_estimators: self
                .base_estimators
                .into_iter()
                .map(ModelSnapshot::restore)
                .collect::<Result<_>>()?,
            meta_estimator: self.meta_estimator.restore()?,
            cv: self.cv,
            use_probas: self.use_probas,
            use_original_features: self.use_original_features,
            seed: self.seed,
        };
        let fitted = match self.fitted {
            Some(f) => {
                if f.bases.len() != config.base_estimators.len() {
                    return Err(Error::DimensionMismatch {
                        expected: config.base_estimators.len(),
                        found: f.bases.len(),
                    });
                }
                let bases = f
                    .bases
                    .into_iter()
                    .map(ModelSnapshot::restore)
                    .collect::<Result<Vec<_>>>()?;
                Some((bases, f.meta.restore()?, f.blocks, f.n_features, f.n_classes))
            }
            None => None,
        };
        Ok(MetaSynthesis::from_parts(config, fitted))
    }
}
