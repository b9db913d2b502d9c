//! Greedy Gini decision tree.
//!
//! Split candidates are the midpoints between consecutive distinct values of
//! a feature among the node's rows. Split quality is compared in exact
//! integer arithmetic on class counts, so ties are real ties and resolve to
//! the lowest feature index, then the lowest threshold.

use std::cmp::Ordering;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{FeatureMatrix, LabelVector, ProbabilityMatrix};
use crate::error::{Error, Result};
use crate::estimator::{check_fit_inputs, check_predict_inputs, Classifier};
use crate::seed::{derive_seed, rng_from, SeedSpec};
use crate::snapshot::ModelSnapshot;

/// Stream id (under the tree seed) of the per-node feature sampler.
pub const FEATURE_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    Sqrt,
    Fixed(usize),
}

impl MaxFeatures {
    pub fn count(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => ((n_features as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::Fixed(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until purity or until no split is possible.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::All,
        }
    }
}

impl TreeParams {
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::InvalidHyperparameter(format!(
                "min_samples_split must be at least 2, got {}",
                self.min_samples_split
            )));
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::InvalidHyperparameter(
                "min_samples_leaf must be at least 1".into(),
            ));
        }
        if let MaxFeatures::Fixed(k) = self.max_features {
            if k == 0 || k > n_features {
                return Err(Error::InvalidHyperparameter(format!(
                    "max_features {k} outside 1..={n_features}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf { class_counts: Vec<usize> },
}

/// Arena-stored tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedTree {
    nodes: Vec<TreeNode>,
    n_features: usize,
    n_classes: usize,
}

impl FittedTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn leaf_counts(&self, row: &[f64]) -> &[usize] {
        let mut node = 0;
        loop {
            match &self.nodes[node] {
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if row[*feature] <= *threshold { *left } else { *right },
                TreeNode::Leaf { class_counts } => return class_counts,
            }
        }
    }

    /// Leaf class counts normalized to proportions.
    pub fn class_distribution(&self, row: &[f64]) -> Vec<f64> {
        let counts = self.leaf_counts(row);
        let total: usize = counts.iter().sum();
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    /// Majority class of the leaf; ties go to the lowest class index.
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let counts = self.leaf_counts(row);
        let mut best = 0;
        for (i, &c) in counts.iter().enumerate().skip(1) {
            if c > counts[best] {
                best = i;
            }
        }
        best
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Vec<usize> {
        x.rows().map(|r| self.predict_row(r)).collect()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }
}

/// `1 - Σ p_c²` over the empirical class proportions.
pub fn gini_impurity(class_counts: &[usize]) -> Result<f64> {
    let total: usize = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyNode);
    }
    let n = total as f64;
    Ok(1.0 - class_counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Parent Gini minus the size-weighted child Gini.
    pub gain: f64,
}

/// `Σ_left c² / n_left + Σ_right c² / n_right` as an exact fraction. The
/// weighted child Gini is `1 - purity / n`, so larger purity is better.
#[derive(Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn new(sq_left: u128, n_left: u128, sq_right: u128, n_right: u128) -> Self {
        Self {
            num: sq_left * n_right + sq_right * n_left,
            den: n_left * n_right,
        }
    }

    fn cmp(&self, other: &Purity) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

fn sum_sq(counts: &[usize]) -> u128 {
    counts.iter().map(|&c| (c as u128) * (c as u128)).sum()
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo / 2.0 + hi / 2.0;
    // rounding can land on `hi`, which would send `hi` to the left child
    if mid < hi {
        mid
    } else {
        lo
    }
}

/// Best Gini split of `rows` over `candidate_features`, or `None` when no
/// candidate lowers impurity while leaving at least `min_samples_leaf` rows
/// on each side.
pub fn best_split(
    x: &FeatureMatrix,
    y: &LabelVector,
    rows: &[usize],
    candidate_features: &[usize],
    min_samples_leaf: usize,
) -> Option<Split> {
    let n = rows.len();
    if n < 2 {
        return None;
    }
    let labels = y.indices();
    let mut parent = vec![0usize; y.n_classes()];
    for &r in rows {
        parent[labels[r]] += 1;
    }
    let parent_sq = sum_sq(&parent);
    let parent_purity = Purity {
        num: parent_sq,
        den: n as u128,
    };

    let mut features = candidate_features.to_vec();
    features.sort_unstable();
    features.dedup();

    let mut best: Option<(usize, f64, Purity)> = None;
    let mut order = rows.to_vec();
    for &feature in &features {
        order.sort_by(|&a, &b| x.get(a, feature).total_cmp(&x.get(b, feature)));
        let mut left = vec![0usize; parent.len()];
        let mut right = parent.clone();
        let (mut sq_left, mut sq_right) = (0u128, parent_sq);
        for i in 0..n - 1 {
            let c = labels[order[i]];
            sq_left += 2 * left[c] as u128 + 1;
            sq_right -= 2 * right[c] as u128 - 1;
            left[c] += 1;
            right[c] -= 1;

            let (lo, hi) = (x.get(order[i], feature), x.get(order[i + 1], feature));
            let n_left = i + 1;
            if lo >= hi || n_left < min_samples_leaf || n - n_left < min_samples_leaf {
                continue;
            }
            let purity = Purity::new(sq_left, n_left as u128, sq_right, (n - n_left) as u128);
            if best.is_none_or(|(_, _, b)| purity.cmp(&b) == Ordering::Greater) {
                best = Some((feature, midpoint(lo, hi), purity));
            }
        }
    }

    let (feature, threshold, purity) = best?;
    // gain must be strictly positive: purity / n > parent_sq / n²
    if (purity.num * n as u128).cmp(&(parent_purity.num * purity.den)) != Ordering::Greater {
        return None;
    }
    let nf = n as f64;
    let gain = (purity.num as f64 / purity.den as f64) / nf - parent_sq as f64 / (nf * nf);
    Some(Split {
        feature,
        threshold,
        gain,
    })
}

/// Fits a tree on every row of `x`.
pub fn fit_tree(
    x: &FeatureMatrix,
    y: &LabelVector,
    params: &TreeParams,
    seed: u64,
) -> Result<FittedTree> {
    check_fit_inputs(x, y)?;
    params.validate(x.n_cols())?;
    Ok(grow_tree(x, y, (0..x.n_rows()).collect(), params, seed))
}

/// Grows a tree on `rows` (repeats allowed, as produced by bootstrapping).
/// Inputs must already be validated.
pub(crate) fn grow_tree(
    x: &FeatureMatrix,
    y: &LabelVector,
    rows: Vec<usize>,
    params: &TreeParams,
    seed: u64,
) -> FittedTree {
    let n_features = x.n_cols();
    let n_classes = y.n_classes();
    let labels = y.indices();
    let k = params.max_features.count(n_features);
    let mut rng = rng_from(derive_seed(seed, FEATURE_STREAM));

    let mut nodes = vec![TreeNode::Leaf {
        class_counts: Vec::new(),
    }];
    // depth-first, left child first
    let mut stack = vec![(0usize, rows, 0usize)];
    while let Some((slot, rows, depth)) = stack.pop() {
        let mut counts = vec![0usize; n_classes];
        for &r in &rows {
            counts[labels[r]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let can_split = !pure
            && params.max_depth.is_none_or(|d| depth < d)
            && rows.len() >= params.min_samples_split
            && rows.len() >= 2 * params.min_samples_leaf;

        let split = if can_split {
            let candidates: Vec<usize> = if k >= n_features {
                (0..n_features).collect()
            } else {
                sample(&mut rng, n_features, k).into_vec()
            };
            best_split(x, y, &rows, &candidates, params.min_samples_leaf)
        } else {
            None
        };

        match split {
            None => nodes[slot] = TreeNode::Leaf { class_counts: counts },
            Some(split) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&r| x.get(r, split.feature) <= split.threshold);
                let left = nodes.len();
                let right = left + 1;
                nodes.push(TreeNode::Leaf {
                    class_counts: Vec::new(),
                });
                nodes.push(TreeNode::Leaf {
                    class_counts: Vec::new(),
                });
                nodes[slot] = TreeNode::Internal {
                    feature: split.feature,
                    threshold: split.threshold,
                    left,
                    right,
                };
                stack.push((right, right_rows, depth + 1));
                stack.push((left, left_rows, depth + 1));
            }
        }
    }

    FittedTree {
        nodes,
        n_features,
        n_classes,
    }
}

/// Single decision tree estimator. Defaults consider every feature at every
/// node, so the fit is deterministic regardless of seed.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DecisionTree {
    pub params: TreeParams,
    pub seed: SeedSpec,
    fitted: Option<FittedTree>,
}

impl DecisionTree {
    pub fn new(params: TreeParams, seed: SeedSpec) -> Self {
        Self {
            params,
            seed,
            fitted: None,
        }
    }

    pub fn fitted(&self) -> Option<&FittedTree> {
        self.fitted.as_ref()
    }
}

impl Classifier for DecisionTree {
    fn kind(&self) -> &'static str {
        "decision_tree"
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &LabelVector) -> Result<()> {
        self.fitted = Some(fit_tree(x, y, &self.params, self.seed.resolve())?);
        Ok(())
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<LabelVector> {
        let tree = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        check_predict_inputs(x, tree.n_features)?;
        LabelVector::new(tree.predict(x), tree.n_classes)
    }

    fn supports_proba(&self) -> bool {
        true
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        let tree = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        check_predict_inputs(x, tree.n_features)?;
        let values = x.rows().flat_map(|r| tree.class_distribution(r)).collect();
        ProbabilityMatrix::new(x.n_rows(), tree.n_classes, values)
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fresh_clone(&self) -> Box<dyn Classifier> {
        Box::new(Self::new(self.params, self.seed))
    }

    fn reseed(&mut self, seed: u64) {
        self.seed = SeedSpec::fixed(seed);
    }

    fn hyperparameters(&self) -> Value {
        json!({ "tree": self.params, "seed": self.seed })
    }

    fn snapshot(&self) -> Result<ModelSnapshot> {
        Ok(ModelSnapshot::DecisionTree(self.clone()))
    }
}
