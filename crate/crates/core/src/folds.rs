//! Stratified k-fold assignment.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::LabelVector;
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    n_folds: usize,
}

impl FoldAssignment {
    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    pub fn n_folds(&self) -> usize {
        self.n_folds
    }

    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }
}

/// Shuffles each class's members with its own derived stream and deals them
/// round-robin into `cv` folds. The dealing position carries over from one
/// class to the next, so overall fold sizes also differ by at most one.
pub fn stratified_folds(y: &LabelVector, cv: usize, seed: u64) -> Result<FoldAssignment> {
    if cv < 2 {
        return Err(Error::InvalidHyperparameter(format!("cv must be at least 2, got {cv}")));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); y.n_classes()];
    for (i, &c) in y.indices().iter().enumerate() {
        members[c].push(i);
    }
    if let Some((class, m)) = members.iter().enumerate().find(|(_, m)| m.len() < cv) {
        return Err(Error::InsufficientClassMembers {
            class,
            count: m.len(),
            folds: cv,
        });
    }

    let mut fold_of = vec![0; y.len()];
    let mut next = 0;
    for (class, rows) in members.iter_mut().enumerate() {
        let mut rng = rng_from(derive_seed(seed, class as u64));
        rows.shuffle(&mut rng);
        for &row in rows.iter() {
            fold_of[row] = next;
            next = (next + 1) % cv;
        }
    }
    Ok(FoldAssignment { fold_of, n_folds: cv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(counts: &[usize]) -> LabelVector {
        let idx = counts
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
            .collect();
        LabelVector::new(idx, counts.len()).unwrap()
    }

    #[test]
    fn divisible_classes_split_evenly() {
        let y = labels(&[10, 10]);
        let folds = stratified_folds(&y, 5, 0).unwrap();
        for k in 0..5 {
            let test = folds.test_rows(k);
            let zeros = test.iter().filter(|&&i| y.indices()[i] == 0).count();
            assert_eq!((zeros, test.len() - zeros), (2, 2));
        }
    }

    #[test]
    fn small_class_rejected() {
        let y = labels(&[10, 3]);
        assert_eq!(
            stratified_folds(&y, 5, 0).unwrap_err(),
            Error::InsufficientClassMembers { class: 1, count: 3, folds: 5 }
        );
    }

    #[test]
    fn deterministic_per_seed() {
        let y = labels(&[7, 9, 5]);
        assert_eq!(stratified_folds(&y, 5, 4).unwrap(), stratified_folds(&y, 5, 4).unwrap());
        assert_ne!(stratified_folds(&y, 5, 4).unwrap(), stratified_folds(&y, 5, 5).unwrap());
    }

    proptest! {
        #[test]
        fn partition_and_balance(counts in prop::collection::vec(5usize..30, 2..5), cv in 2usize..6, seed: u64) {
            let y = labels(&counts);
            let folds = stratified_folds(&y, cv, seed).unwrap();
            let mut seen = vec![0; y.len()];
            for k in 0..cv {
                for i in folds.test_rows(k) {
                    seen[i] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
            for c in 0..counts.len() {
                let sizes: Vec<usize> = (0..cv)
                    .map(|k| folds.test_rows(k).iter().filter(|&&i| y.indices()[i] == c).count())
                    .collect();
                prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            }
            let totals: Vec<usize> = (0..cv).map(|k| folds.test_rows(k).len()).collect();
            prop_assert!(totals.iter().max().unwrap() - totals.iter().min().unwrap() <= 1);
        }
    }
}
