//! Min-max normalization, cross-dataset aggregation and fractional ranks.
//!
//! Per dataset `d`, `n = (s - min_d) / (max_d - min_d)`, or 1 for every
//! model when all scores tie. A model's MinMax score is the mean of its
//! normalized scores, summed in dataset-id order. Ties in raw accuracy get
//! the mean of the ranks they span.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Accuracy per (model, dataset), keyed model first. Iteration is in id
/// order, which fixes every summation order below.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScoreGrid {
    cells: BTreeMap<String, BTreeMap<String, f64>>,
}

impl ScoreGrid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, model: &str, dataset: &str, score: f64) {
        self.cells
            .entry(model.to_owned())
            .or_default()
            .insert(dataset.to_owned(), score);
    }

    pub fn get(&self, model: &str, dataset: &str) -> Option<f64> {
        self.cells.get(model)?.get(dataset).copied()
    }

    pub fn models(&self) -> Vec<&str> {
        self.cells.keys().map(String::as_str).collect()
    }

    /// Union of datasets over all models, sorted.
    pub fn datasets(&self) -> Vec<&str> {
        let all: BTreeSet<&str> = self
            .cells
            .values()
            .flat_map(|row| row.keys().map(String::as_str))
            .collect();
        all.into_iter().collect()
    }

    pub fn ensure_complete(&self) -> Result<()> {
        for d in self.datasets() {
            for m in self.models() {
                if self.get(m, d).is_none() {
                    return Err(BenchError::IncompleteGrid {
                        model: m.to_owned(),
                        dataset: d.to_owned(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Scores on one dataset in model-id order.
    fn column(&self, dataset: &str) -> Result<Vec<f64>> {
        self.models()
            .into_iter()
            .map(|m| {
                self.get(m, dataset).ok_or_else(|| BenchError::IncompleteGrid {
                    model: m.to_owned(),
                    dataset: dataset.to_owned(),
                })
            })
            .collect()
    }

    /// Per-model mean over datasets, summed in dataset-id order.
    fn row_means(&self) -> Result<BTreeMap<String, f64>> {
        self.ensure_complete()?;
        let datasets = self.datasets();
        Ok(self
            .cells
            .iter()
            .map(|(m, row)| {
                let total: f64 = datasets.iter().map(|d| row[*d]).sum();
                (m.clone(), total / datasets.len() as f64)
            })
            .collect())
    }
}

/// Min-max normalizes the scores of one dataset.
pub fn minmax_normalize(dataset: &str, scores: &[f64]) -> Result<Vec<f64>> {
    if scores.len() < 2 {
        return Err(BenchError::TooFewModels {
            dataset: dataset.to_owned(),
            count: scores.len(),
        });
    }
    let (min, max) = min_max(scores);
    Ok(scores
        .iter()
        .map(|&s| if max == min { 1.0 } else { (s - min) / (max - min) })
        .collect())
}

fn min_max(scores: &[f64]) -> (f64, f64) {
    scores
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub raw: ScoreGrid,
    pub normalized: ScoreGrid,
    pub min: BTreeMap<String, f64>,
    pub max: BTreeMap<String, f64>,
}

pub fn normalize_grid(raw: &ScoreGrid) -> Result<ScoreTable> {
    raw.ensure_complete()?;
    let models = raw.models();
    let mut normalized = ScoreGrid::new();
    let (mut min, mut max) = (BTreeMap::new(), BTreeMap::new());
    for d in raw.datasets() {
        let scores = raw.column(d)?;
        let (lo, hi) = min_max(&scores);
        min.insert(d.to_owned(), lo);
        max.insert(d.to_owned(), hi);
        for (m, n) in models.iter().zip(minmax_normalize(d, &scores)?) {
            normalized.insert(m, d, n);
        }
    }
    Ok(ScoreTable {
        raw: raw.clone(),
        normalized,
        min,
        max,
    })
}

/// Mean normalized score per model.
pub fn aggregate_minmax(table: &ScoreTable) -> Result<BTreeMap<String, f64>> {
    table.normalized.row_means()
}

/// 1-based ranks, best (highest) score first; tied scores share the mean
/// of the positions they occupy.
pub fn fractional_ranks(scores: &[f64]) -> Vec<f64> {
    scores
        .iter()
        .map(|&s| {
            let better = scores.iter().filter(|&&o| o > s).count();
            let tied = scores.iter().filter(|&&o| o == s).count();
            better as f64 + (tied as f64 + 1.0) / 2.0
        })
        .collect()
}

/// Mean fractional rank per model over all datasets.
pub fn average_rank(raw: &ScoreGrid) -> Result<BTreeMap<String, f64>> {
    raw.ensure_complete()?;
    let models = raw.models();
    let mut ranks = ScoreGrid::new();
    for d in raw.datasets() {
        for (m, r) in models.iter().zip(fractional_ranks(&raw.column(d)?)) {
            ranks.insert(m, d, r);
        }
    }
    ranks.row_means()
}
