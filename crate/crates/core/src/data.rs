//! Dense sample representation shared by every estimator.

use std::collections::BTreeSet;
use std::fmt::Display;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense matrix of features, one row per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl FeatureMatrix {
    /// Builds a matrix from row-major values. Only the shape is checked here;
    /// finiteness is checked by [`validate_matrix`].
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                expected: n_rows * n_cols,
                found: values.len(),
            });
        }
        Ok(Self { values, n_rows, n_cols })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            values,
            n_rows: rows.len(),
            n_cols,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            values: vec![0.0; n_rows * n_cols],
            n_rows,
            n_cols,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.n_cols + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.values[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows).map(move |r| self.row(r))
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_rows).map(move |r| self.get(r, col))
    }

    /// Copies the given rows (repeats allowed) into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self {
            values,
            n_rows: indices.len(),
            n_cols: self.n_cols,
        }
    }

    /// Horizontal concatenation, blocks in argument order.
    pub fn hstack(blocks: &[&FeatureMatrix]) -> Result<Self> {
        let n_rows = blocks.first().map_or(0, |b| b.n_rows);
        if let Some(bad) = blocks.iter().find(|b| b.n_rows != n_rows) {
            return Err(Error::DimensionMismatch {
                expected: n_rows,
                found: bad.n_rows,
            });
        }
        let n_cols: usize = blocks.iter().map(|b| b.n_cols).sum();
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for r in 0..n_rows {
            for b in blocks {
                values.extend_from_slice(b.row(r));
            }
        }
        Ok(Self { values, n_rows, n_cols })
    }
}

/// Confirms nonzero dimensions and that every cell is finite.
pub fn validate_matrix(x: &FeatureMatrix) -> Result<()> {
    if x.n_rows == 0 || x.n_cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    match x.values.iter().position(|v| !v.is_finite()) {
        Some(pos) => Err(Error::NonFiniteValue {
            row: pos / x.n_cols,
            col: pos % x.n_cols,
        }),
        None => Ok(()),
    }
}

/// Distinct original labels, sorted by their text form. Position `j` is
/// class index `j` everywhere (label vectors, probability columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSet {
    labels: Vec<String>,
}

impl ClassSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let sorted: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        if sorted.len() < 2 {
            return Err(Error::DegenerateTarget);
        }
        Ok(Self {
            labels: sorted.into_iter().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn decode(&self, y: &LabelVector) -> Result<Vec<String>> {
        y.indices()
            .iter()
            .map(|&i| {
                self.label(i).map(str::to_owned).ok_or(Error::InvalidClassIndex {
                    index: i,
                    n_classes: self.len(),
                })
            })
            .collect()
    }
}

/// Encoded targets: one class index per sample plus the class count they
/// index into.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelVector {
    indices: Vec<usize>,
    n_classes: usize,
}

impl LabelVector {
    pub fn new(indices: Vec<usize>, n_classes: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= n_classes) {
            return Err(Error::InvalidClassIndex {
                index: bad,
                n_classes,
            });
        }
        Ok(Self { indices, n_classes })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Subset keeping the global class count, so class indices stay aligned.
    pub fn select(&self, rows: &[usize]) -> Self {
        Self {
            indices: rows.iter().map(|&r| self.indices[r]).collect(),
            n_classes: self.n_classes,
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &i in &self.indices {
            counts[i] += 1;
        }
        counts
    }

    pub fn accuracy(&self, truth: &LabelVector) -> f64 {
        if self.indices.is_empty() {
            return 0.0;
        }
        let hits = self
            .indices
            .iter()
            .zip(&truth.indices)
            .filter(|(a, b)| a == b)
            .count();
        hits as f64 / self.indices.len() as f64
    }
}

/// Per-sample class probabilities; column `j` is class index `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityMatrix {
    values: Vec<f64>,
    n_rows: usize,
    n_classes: usize,
}

impl ProbabilityMatrix {
    pub fn new(n_rows: usize, n_classes: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_rows * n_classes {
            return Err(Error::DimensionMismatch {
                expected: n_rows * n_classes,
                found: values.len(),
            });
        }
        Ok(Self {
            values,
            n_rows,
            n_classes,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.n_classes..(row + 1) * self.n_classes]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row-wise argmax; ties go to the lowest class index.
    pub fn argmax(&self) -> LabelVector {
        let indices = (0..self.n_rows).map(|r| argmax(self.row(r))).collect();
        LabelVector {
            indices,
            n_classes: self.n_classes,
        }
    }

    pub fn into_matrix(self) -> FeatureMatrix {
        FeatureMatrix {
            values: self.values,
            n_rows: self.n_rows,
            n_cols: self.n_classes,
        }
    }
}

/// First index of the maximum value.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Maps raw labels to sorted distinct classes and per-sample class indices.
/// Labels are compared by their `Display` text.
pub fn encode_labels<L: Display>(raw: &[L]) -> Result<(ClassSet, LabelVector)> {
    let text: Vec<String> = raw.iter().map(ToString::to_string).collect();
    let classes = ClassSet::new(text.iter().cloned())?;
    let indices = text
        .iter()
        .map(|t| classes.index_of(t).expect("label collected above"))
        .collect();
    let n = classes.len();
    Ok((classes, LabelVector { indices, n_classes: n }))
}
