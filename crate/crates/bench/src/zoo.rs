//! Models available to the benchmark and the command line.

use tabstack::{
    Classifier, DecisionTree, DirectionalForest, LogisticRegression, MetaSynthesis, RandomForest, SeedSpec,
    StackingConfig,
};

use crate::error::{BenchError, Result};
use crate::leaderboard::Generator;

#[derive(Clone, Copy)]
pub struct ModelEntry {
    pub id: &'static str,
    pub generator: Generator,
    build: fn() -> Box<dyn Classifier>,
}

impl ModelEntry {
    /// Unfitted prototype with default hyperparameters.
    pub fn build(&self) -> Box<dyn Classifier> {
        (self.build)()
    }
}

impl std::fmt::Debug for ModelEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelEntry")
            .field("id", &self.id)
            .field("generator", &self.generator)
            .finish()
    }
}

pub fn model_zoo() -> Vec<ModelEntry> {
    vec![
        ModelEntry {
            id: "meta_synthesis",
            generator: Generator::User,
            build: || Box::new(MetaSynthesis::new(StackingConfig::default())),
        },
        ModelEntry {
            id: "directional_forest",
            generator: Generator::System,
            build: || Box::new(DirectionalForest::default()),
        },
        ModelEntry {
            id: "random_forest",
            generator: Generator::Baseline,
            build: || Box::new(RandomForest::new(100, SeedSpec::absent())),
        },
        ModelEntry {
            id: "logistic_regression",
            generator: Generator::Baseline,
            build: || Box::new(LogisticRegression::default()),
        },
        ModelEntry {
            id: "decision_tree",
            generator: Generator::Baseline,
            build: || Box::new(DecisionTree::default()),
        },
    ]
}

pub fn lookup(id: &str) -> Result<ModelEntry> {
    model_zoo()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| BenchError::UnknownModel(id.to_owned()))
}

/// Resolves a comma-separated id list, or `all`. Duplicates are dropped.
pub fn select_models(selection: &str) -> Result<Vec<ModelEntry>> {
    if selection.trim() == "all" {
        return Ok(model_zoo());
    }
    let mut out: Vec<ModelEntry> = Vec::new();
    for id in selection.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let entry = lookup(id)?;
        if !out.iter().any(|e| e.id == entry.id) {
            out.push(entry);
        }
    }
    if out.is_empty() {
        return Err(BenchError::UnknownModel(selection.to_owned()));
    }
    Ok(out)
}
