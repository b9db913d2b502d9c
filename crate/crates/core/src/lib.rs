//! Tabular classifiers built around two ensemble designs:
//!
//! - [`MetaSynthesis`]: stacked generalization over heterogeneous base
//!   learners, with the meta-estimator trained on out-of-fold probability
//!   features.
//! - [`DirectionalForest`]: a tree ensemble trained in a feature space
//!   oriented by the sign of summed class-mean deviations, predicting by
//!   plurality vote.
//!
//! Both sit on self-contained base learners ([`DecisionTree`],
//! [`RandomForest`], [`LogisticRegression`]) that implement the shared
//! [`Classifier`] contract.

pub mod data;
pub mod directional;
pub mod error;
pub mod estimator;
pub mod folds;
pub mod learners;
pub mod metasynthesis;
pub mod seed;
pub mod snapshot;

pub use data::{
    encode_labels, validate_matrix, ClassSet, FeatureMatrix, LabelVector, ProbabilityMatrix,
};
pub use directional::{apply_directions, compute_directions, DirectionVector, DirectionalForest};
pub use error::{Error, Result};
pub use estimator::Classifier;
pub use folds::{stratified_folds, FoldAssignment};
pub use learners::forest::RandomForest;
pub use learners::logistic::{LogisticConfig, LogisticRegression};
pub use learners::tree::{best_split, fit_tree, gini_impurity, DecisionTree, FittedTree, MaxFeatures, Split, TreeParams};
pub use learners::vote::plurality_vote;
pub use metasynthesis::{oof_meta_features, MetaFeatureMatrix, MetaSynthesis, StackingConfig};
pub use seed::{derive_seed, SeedSpec};
pub use snapshot::ModelSnapshot;
