use proptest::prelude::*;
use rand::Rng;
use tabstack::learners::logistic::softmax_loss_gradient;
use tabstack::{Classifier, LogisticConfig, LogisticRegression};
use tabstack_testkit::datasets::{mirrored, random_table, rng, separable_blobs};
use tabstack_testkit::perceptron::perceptron_accuracy;

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn analytic_gradient_matches_central_differences(
        seed in any::<u64>(),
        n in 2usize..=50,
        f in 1usize..=5,
        k in 2usize..=4,
    ) {
        let (x, y) = random_table(seed, n, f, k, 0, None);
        let mut r = rng(seed ^ 0xabc);
        let w: Vec<f64> = (0..k * f).map(|_| r.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..k).map(|_| r.gen_range(-1.0..1.0)).collect();
        let l2 = 1e-2;
        let (_, gw, gb) = softmax_loss_gradient(&x, &y, &w, &b, l2);
        let h = 1e-5;
        for i in 0..w.len() {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[i] += h;
            down[i] -= h;
            let numeric = (softmax_loss_gradient(&x, &y, &up, &b, l2).0
                - softmax_loss_gradient(&x, &y, &down, &b, l2).0) / (2.0 * h);
            prop_assert!(relative_error(gw[i], numeric) <= 1e-4, "w[{}]: {} vs {}", i, gw[i], numeric);
        }
        for i in 0..k {
            let (mut up, mut down) = (b.clone(), b.clone());
            up[i] += h;
            down[i] -= h;
            let numeric = (softmax_loss_gradient(&x, &y, &w, &up, l2).0
                - softmax_loss_gradient(&x, &y, &w, &down, l2).0) / (2.0 * h);
            prop_assert!(relative_error(gb[i], numeric) <= 1e-4, "b[{}]: {} vs {}", i, gb[i], numeric);
        }
    }
}

#[test]
fn separable_blobs_are_learned() {
    for seed in 0..5 {
        let (x, y) = separable_blobs(seed, 200, 3, 3.0);
        // the perceptron certifies linear separability independently
        assert_eq!(perceptron_accuracy(&x, &y, 1000), 1.0);
        let mut model = LogisticRegression::default();
        model.fit(&x, &y).unwrap();
        assert!(model.predict(&x).unwrap().accuracy(&y) >= 0.99);
    }
}

#[test]
fn mirrored_data_yields_zero_bias() {
    let (x, y) = mirrored(9, 50, 3);
    let mut model = LogisticRegression::new(LogisticConfig::default());
    model.fit(&x, &y).unwrap();
    let fit = model.fitted().unwrap();
    for b in &fit.bias {
        assert!(b.abs() <= 1e-6, "bias {b}");
    }
}
