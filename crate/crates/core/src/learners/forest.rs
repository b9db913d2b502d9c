//! Bootstrap random forest with soft-averaged leaf distributions.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{FeatureMatrix, LabelVector, ProbabilityMatrix};
use crate::error::{Error, Result};
use crate::estimator::{check_fit_inputs, check_predict_inputs, Classifier};
use crate::learners::tree::{grow_tree, FittedTree, MaxFeatures, TreeParams};
use crate::seed::{derive_seed, rng_from, SeedSpec};
use crate::snapshot::ModelSnapshot;

/// Stream id (under each tree seed) of the bootstrap sampler.
const BOOTSTRAP_STREAM: u64 = 0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomForest {
    pub n_estimators: usize,
    pub tree: TreeParams,
    pub bootstrap: bool,
    pub seed: SeedSpec,
    fitted: Option<ForestFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ForestFit {
    trees: Vec<FittedTree>,
    n_features: usize,
    n_classes: usize,
}

impl Default for RandomForest {
    fn default() -> Self {
        Self::new(100, SeedSpec::absent())
    }
}

impl RandomForest {
    pub fn new(n_estimators: usize, seed: SeedSpec) -> Self {
        Self {
            n_estimators,
            tree: TreeParams {
                max_features: MaxFeatures::Sqrt,
                ..TreeParams::default()
            },
            bootstrap: true,
            seed,
            fitted: None,
        }
    }

    pub fn with_tree_params(mut self, tree: TreeParams) -> Self {
        self.tree = tree;
        self
    }

    pub fn with_bootstrap(mut self, bootstrap: bool) -> Self {
        self.bootstrap = bootstrap;
        self
    }

    pub fn trees(&self) -> Option<&[FittedTree]> {
        self.fitted.as_ref().map(|f| f.trees.as_slice())
    }
}

/// Seed of tree `index` in a forest with base seed `base`. A standalone
/// tree fit with this seed reproduces the forest member exactly when
/// bootstrapping is off.
pub fn tree_seed(base: u64, index: usize) -> u64 {
    derive_seed(base, index as u64)
}

impl Classifier for RandomForest {
    fn kind(&self) -> &'static str {
        "random_forest"
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &LabelVector) -> Result<()> {
        check_fit_inputs(x, y)?;
        self.tree.validate(x.n_cols())?;
        if self.n_estimators == 0 {
            return Err(Error::InvalidHyperparameter("n_estimators must be at least 1".into()));
        }
        let base = self.seed.resolve();
        let n = x.n_rows();
        let trees = (0..self.n_estimators)
            .into_par_iter()
            .map(|i| {
                let seed = tree_seed(base, i);
                let rows = if self.bootstrap {
                    let mut rng = rng_from(derive_seed(seed, BOOTSTRAP_STREAM));
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                grow_tree(x, y, rows, &self.tree, seed)
            })
            .collect();
        self.fitted = Some(ForestFit {
            trees,
            n_features: x.n_cols(),
            n_classes: y.n_classes(),
        });
        Ok(())
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<LabelVector> {
        Ok(self.predict_proba(x)?.argmax())
    }

    fn supports_proba(&self) -> bool {
        true
    }

    /// Mean of the per-tree leaf distributions, summed in tree order.
    fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        let fit = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        check_predict_inputs(x, fit.n_features)?;
        let k = fit.n_classes;
        let scale = 1.0 / fit.trees.len() as f64;
        let mut values = vec![0.0; x.n_rows() * k];
        for (r, row) in x.rows().enumerate() {
            let acc = &mut values[r * k..(r + 1) * k];
            for tree in &fit.trees {
                for (a, p) in acc.iter_mut().zip(tree.class_distribution(row)) {
                    *a += p;
                }
            }
            acc.iter_mut().for_each(|a| *a *= scale);
        }
        ProbabilityMatrix::new(x.n_rows(), k, values)
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fresh_clone(&self) -> Box<dyn Classifier> {
        Box::new(Self {
            fitted: None,
            ..self.clone()
        })
    }

    fn reseed(&mut self, seed: u64) {
        self.seed = SeedSpec::fixed(seed);
    }

    fn hyperparameters(&self) -> Value {
        json!({
            "n_estimators": self.n_estimators,
            "bootstrap": self.bootstrap,
            "tree": self.tree,
            "seed": self.seed,
        })
    }

    fn snapshot(&self) -> Result<ModelSnapshot> {
        Ok(ModelSnapshot::RandomForest(self.clone()))
    }
}
