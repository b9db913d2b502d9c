//! Directional forest: orient each feature by the sign of the summed
//! deviations of the class means from the global mean, fit a tree ensemble
//! on the oriented features and predict by plurality vote.
//!
//! Every tree sees all training rows (no bootstrap). Diversity comes only
//! from per-node feature subsampling, driven by a distinct seed per tree.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{FeatureMatrix, LabelVector};
use crate::error::{Error, Result};
use crate::estimator::{check_fit_inputs, check_predict_inputs, Classifier};
use crate::learners::forest::tree_seed;
use crate::learners::tree::{grow_tree, FittedTree, MaxFeatures, TreeParams};
use crate::learners::vote::plurality_vote;
use crate::seed::SeedSpec;
use crate::snapshot::ModelSnapshot;

/// Per-feature orientation, each entry in {-1, 0, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct DirectionVector(Vec<i8>);

impl DirectionVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|d| !(-1..=1).contains(*d)) {
            return Err(Error::InvalidHyperparameter(format!(
                "direction entry {bad} not in {{-1, 0, 1}}"
            )));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<i8>> for DirectionVector {
    type Error = Error;

    fn try_from(entries: Vec<i8>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<DirectionVector> for Vec<i8> {
    fn from(d: DirectionVector) -> Self {
        d.0
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// `d_j = sign(Σ_c (mean_c[j] - mean[j]))`, with an exact comparison
/// against zero.
pub fn compute_directions(x: &FeatureMatrix, y: &LabelVector) -> Result<DirectionVector> {
    check_fit_inputs(x, y)?;
    let f = x.n_cols();
    let k = y.n_classes();
    let mut class_sums = vec![0.0; k * f];
    let mut global_sum = vec![0.0; f];
    let counts = y.class_counts();
    if let Some(missing) = counts.iter().position(|&c| c == 0) {
        return Err(Error::MissingClass(missing));
    }
    for (row, &c) in x.rows().zip(y.indices()) {
        for j in 0..f {
            class_sums[c * f + j] += row[j];
            global_sum[j] += row[j];
        }
    }
    let n = x.n_rows() as f64;
    let entries = (0..f)
        .map(|j| {
            let global_mean = global_sum[j] / n;
            let total: f64 = (0..k)
                .map(|c| class_sums[c * f + j] / counts[c] as f64 - global_mean)
                .sum();
            sign(total)
        })
        .collect();
    Ok(DirectionVector(entries))
}

/// Element-wise product of every row with `d`.
pub fn apply_directions(x: &FeatureMatrix, d: &DirectionVector) -> Result<FeatureMatrix> {
    if x.n_cols() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            found: x.n_cols(),
        });
    }
    let mut out = x.clone();
    for r in 0..out.n_rows() {
        for (v, &dj) in out.row_mut(r).iter_mut().zip(d.entries()) {
            *v *= f64::from(dj);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DirectionalFit {
    directions: DirectionVector,
    trees: Vec<FittedTree>,
    n_classes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionalForest {
    pub n_estimators: usize,
    pub tree: TreeParams,
    pub seed: SeedSpec,
    fitted: Option<DirectionalFit>,
}

impl Default for DirectionalForest {
    fn default() -> Self {
        Self::new(100, SeedSpec::absent())
    }
}

impl DirectionalForest {
    pub fn new(n_estimators: usize, seed: SeedSpec) -> Self {
        Self {
            n_estimators,
            tree: TreeParams {
                max_features: MaxFeatures::Sqrt,
                ..TreeParams::default()
            },
            seed,
            fitted: None,
        }
    }

    pub fn with_tree_params(mut self, tree: TreeParams) -> Self {
        self.tree = tree;
        self
    }

    pub fn directions(&self) -> Option<&DirectionVector> {
        self.fitted.as_ref().map(|f| &f.directions)
    }

    pub fn trees(&self) -> Option<&[FittedTree]> {
        self.fitted.as_ref().map(|f| f.trees.as_slice())
    }
}

impl Classifier for DirectionalForest {
    fn kind(&self) -> &'static str {
        "directional_forest"
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &LabelVector) -> Result<()> {
        check_fit_inputs(x, y)?;
        self.tree.validate(x.n_cols())?;
        if self.n_estimators == 0 {
            return Err(Error::InvalidHyperparameter("n_estimators must be at least 1".into()));
        }
        let directions = compute_directions(x, y)?;
        let oriented = apply_directions(x, &directions)?;
        let base = self.seed.resolve();
        let trees = (0..self.n_estimators)
            .into_par_iter()
            .map(|i| grow_tree(&oriented, y, (0..x.n_rows()).collect(), &self.tree, tree_seed(base, i)))
            .collect();
        self.fitted = Some(DirectionalFit {
            directions,
            trees,
            n_classes: y.n_classes(),
        });
        Ok(())
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<LabelVector> {
        let fit = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        check_predict_inputs(x, fit.directions.len())?;
        let oriented = apply_directions(x, &fit.directions)?;
        let votes: Vec<Vec<usize>> = fit.trees.iter().map(|t| t.predict(&oriented)).collect();
        LabelVector::new(plurality_vote(&votes, fit.n_classes), fit.n_classes)
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
            "tree": self.tree,
            "seed": self.seed,
        })
    }

    fn snapshot(&self) -> Result<ModelSnapshot> {
        Ok(ModelSnapshot::DirectionalForest(self.clone()))
    }
}
