use proptest::prelude::*;
use tabstack::{fit_tree, DecisionTree, Classifier, SeedSpec, TreeParams};
use tabstack_testkit::datasets::random_table;
use tabstack_testkit::tree_oracle::brute_force_predictions;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_search_matches_brute_force(
        seed in any::<u64>(),
        n in 4usize..=20,
        f in 1usize..=3,
        k in 2usize..=3,
        depth in 0usize..=2,
        integer in any::<bool>(),
    ) {
        let (x, y) = random_table(seed, n, f, k, 1, integer.then_some(4));
        let params = TreeParams { max_depth: Some(depth), ..TreeParams::default() };
        let tree = fit_tree(&x, &y, &params, seed).unwrap();
        prop_assert_eq!(tree.predict(&x), brute_force_predictions(&x, &y, depth));
    }

    #[test]
    fn deeper_trees_never_fit_worse(seed in any::<u64>(), n in 6usize..40) {
        let (x, y) = random_table(seed, n, 2, 3, 1, Some(5));
        let mut last = 0.0;
        for depth in 0..6 {
            let params = TreeParams { max_depth: Some(depth), ..TreeParams::default() };
            let acc = y.accuracy_of(&fit_tree(&x, &y, &params, 0).unwrap().predict(&x));
            prop_assert!(acc >= last);
            last = acc;
        }
    }

    #[test]
    fn row_order_does_not_change_training_predictions(seed in any::<u64>(), n in 4usize..30) {
        let (x, y) = random_table(seed, n, 3, 2, 1, None);
        let reversed: Vec<usize> = (0..n).rev().collect();
        let mut a = DecisionTree::new(TreeParams::default(), SeedSpec::fixed(1));
        let mut b = DecisionTree::new(TreeParams::default(), SeedSpec::fixed(1));
        a.fit(&x, &y).unwrap();
        b.fit(&x.select_rows(&reversed), &y.select(&reversed)).unwrap();
        prop_assert_eq!(a.predict(&x).unwrap(), b.predict(&x).unwrap());
    }
}

trait AccuracyOf {
    fn accuracy_of(&self, pred: &[usize]) -> f64;
}

impl AccuracyOf for tabstack::LabelVector {
    fn accuracy_of(&self, pred: &[usize]) -> f64 {
        let hits = self.indices().iter().zip(pred).filter(|(a, b)| a == b).count();
        hits as f64 / self.len() as f64
    }
}
