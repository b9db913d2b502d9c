//! Synthetic data generators. All take an explicit seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tabstack::{FeatureMatrix, LabelVector};

pub type Dataset = (FeatureMatrix, LabelVector);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn build(rows: Vec<Vec<f64>>, labels: Vec<usize>, n_classes: usize) -> Dataset {
    (
        FeatureMatrix::from_rows(&rows).expect("generator produced ragged rows"),
        LabelVector::new(labels, n_classes).expect("generator produced bad labels"),
    )
}

/// Labels with every class present at least `min_per_class` times, shuffled.
pub fn balanced_labels(rng: &mut impl Rng, n: usize, n_classes: usize, min_per_class: usize) -> Vec<usize> {
    assert!(n >= n_classes * min_per_class);
    let mut labels: Vec<usize> = (0..n_classes)
        .flat_map(|c| std::iter::repeat(c).take(min_per_class))
        .collect();
    while labels.len() < n {
        labels.push(rng.gen_range(0..n_classes));
    }
    labels.shuffle(rng);
    labels
}

/// Random features with labels independent of them. Integer-valued when
/// `levels` is `Some(k)` (values in 0..k, so ties are common), otherwise
/// standard normal.
pub fn random_table(
    seed: u64,
    n: usize,
    n_features: usize,
    n_classes: usize,
    min_per_class: usize,
    levels: Option<u32>,
) -> Dataset {
    let mut rng = rng(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let rows = (0..n)
        .map(|_| {
            (0..n_features)
                .map(|_| match levels {
                    Some(k) => rng.gen_range(0..k) as f64,
                    None => normal.sample(&mut rng),
                })
                .collect()
        })
        .collect();
    let labels = balanced_labels(&mut rng, n, n_classes, min_per_class);
    build(rows, labels, n_classes)
}

/// Features that carry class signal: each class gets its own random mean
/// vector, plus unit Gaussian noise.
pub fn informative_table(seed: u64, n: usize, n_features: usize, n_classes: usize) -> Dataset {
    let mut rng = rng(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let centers: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..n_features).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let labels = balanced_labels(&mut rng, n, n_classes, 2);
    let rows = labels
        .iter()
        .map(|&c| centers[c].iter().map(|m| m + normal.sample(&mut rng)).collect())
        .collect();
    build(rows, labels, n_classes)
}

/// Two interleaving half circles with Gaussian noise.
pub fn two_moons(seed: u64, n: usize, noise: f64) -> Dataset {
    let mut rng = rng(seed);
    let normal = Normal::new(0.0, noise).unwrap();
    let n_outer = n / 2;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (class, k, m) = if i < n_outer { (0, i, n_outer) } else { (1, i - n_outer, n - n_outer) };
        let t = std::f64::consts::PI * k as f64 / (m.max(2) - 1) as f64;
        let (x, y) = if class == 0 { (t.cos(), t.sin()) } else { (1.0 - t.cos(), 0.5 - t.sin()) };
        rows.push(vec![x + normal.sample(&mut rng), y + normal.sample(&mut rng)]);
        labels.push(class);
    }
    build(rows, labels, 2)
}

/// Two Gaussian blobs centred at -sep and +sep on every axis, unit noise
/// clipped to (-sep, sep) so the classes never overlap.
pub fn separable_blobs(seed: u64, n: usize, n_features: usize, sep: f64) -> Dataset {
    let mut rng = rng(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let labels = balanced_labels(&mut rng, n, 2, n / 2);
    let rows = labels
        .iter()
        .map(|&c| {
            let centre = if c == 0 { -sep } else { sep };
            (0..n_features)
                .map(|_| {
                    let e: f64 = normal.sample(&mut rng);
                    centre + e.clamp(-0.9 * sep, 0.9 * sep)
                })
                .collect()
        })
        .collect();
    build(rows, labels, 2)
}

/// Point-symmetric binary data: every row `r` labelled 0 is paired with
/// `-r` labelled 1.
pub fn mirrored(seed: u64, n_pairs: usize, n_features: usize) -> Dataset {
    let mut rng = rng(seed);
    let normal = Normal::new(1.0, 1.0).unwrap();
    let mut rows = Vec::with_capacity(2 * n_pairs);
    let mut labels = Vec::with_capacity(2 * n_pairs);
    for _ in 0..n_pairs {
        let r: Vec<f64> = (0..n_features).map(|_| normal.sample(&mut rng)).collect();
        rows.push(r.iter().map(|v| -v).collect());
        labels.push(1);
        rows.push(r);
        labels.push(0);
    }
    build(rows, labels, 2)
}

/// Columns whose direction is exactly zero: either an integer constant, or
/// cycling through 0, 1, 2, 3 inside every class so each class mean equals
/// the global mean. Class sizes are multiples of four. Integer values keep
/// every sum exact, so the computed deviations are exactly zero.
pub struct ZeroDirectionData {
    pub x: FeatureMatrix,
    pub y: LabelVector,
    pub zero_columns: Vec<usize>,
}

pub fn with_zero_direction_columns(seed: u64, n_classes: usize, per_class: usize, n_informative: usize) -> ZeroDirectionData {
    assert!(per_class % 4 == 0);
    let mut rng = rng(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let constant = rng.gen_range(-5i32..=5) as f64;
    let n_features = n_informative + 2;
    let zero_columns = vec![n_informative, n_informative + 1];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for c in 0..n_classes {
        for i in 0..per_class {
            let mut r: Vec<f64> = (0..n_informative)
                .map(|_| c as f64 + normal.sample(&mut rng))
                .collect();
            r.push(constant);
            r.push((i % 4) as f64);
            debug_assert_eq!(r.len(), n_features);
            rows.push(r);
            labels.push(c);
        }
    }
    // shuffle rows together with labels
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(&mut rng);
    let rows: Vec<Vec<f64>> = order.iter().map(|&i| rows[i].clone()).collect();
    let labels: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    let (x, y) = build(rows, labels, n_classes);
    ZeroDirectionData { x, y, zero_columns }
}

/// Copy of `x` with the listed columns negated.
pub fn negate_columns(x: &FeatureMatrix, columns: &[usize]) -> FeatureMatrix {
    let mut out = x.clone();
    for r in 0..out.n_rows() {
        for &c in columns {
            out.set(r, c, -x.get(r, c));
        }
    }
    out
}
