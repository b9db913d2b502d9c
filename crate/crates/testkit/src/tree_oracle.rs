//! Brute-force greedy tree: every node re-partitions its rows for every
//! (feature, distinct-value midpoint) pair and scores each partition from
//! freshly counted classes. No sorting sweep, no incremental counts.

use tabstack::{FeatureMatrix, LabelVector};

fn counts(rows: &[usize], y: &[usize], k: usize) -> Vec<u128> {
    let mut c = vec![0u128; k];
    for &r in rows {
        c[y[r]] += 1;
    }
    c
}

fn majority(c: &[u128]) -> usize {
    let mut best = 0;
    for i in 1..c.len() {
        if c[i] > c[best] {
            best = i;
        }
    }
    best
}

/// Training-set predictions of a depth-limited greedy Gini tree with
/// `min_samples_leaf = 1`, all features considered at every node, ties to
/// the lowest feature then the lowest threshold.
pub fn brute_force_predictions(x: &FeatureMatrix, y: &LabelVector, max_depth: usize) -> Vec<usize> {
    let mut out = vec![0; x.n_rows()];
    let rows: Vec<usize> = (0..x.n_rows()).collect();
    grow(x, y.indices(), y.n_classes(), &rows, max_depth, &mut out);
    out
}

fn grow(x: &FeatureMatrix, y: &[usize], k: usize, rows: &[usize], depth_left: usize, out: &mut [usize]) {
    let parent = counts(rows, y, k);
    let leaf = |out: &mut [usize]| {
        let m = majority(&parent);
        for &r in rows {
            out[r] = m;
        }
    };
    let distinct_classes = parent.iter().filter(|&&c| c > 0).count();
    if depth_left == 0 || rows.len() < 2 || distinct_classes <= 1 {
        return leaf(out);
    }

    let n = rows.len() as u128;
    let parent_sq: u128 = parent.iter().map(|c| c * c).sum();
    // best purity as a fraction num/den; must beat parent_sq / n
    let mut best: Option<(u128, u128, Vec<usize>, Vec<usize>)> = None;
    for f in 0..x.n_cols() {
        let mut values: Vec<f64> = rows.iter().map(|&r| x.get(r, f)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| a == b);
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let t = if t < w[1] { t } else { w[0] };
            let (left, right): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| x.get(r, f) <= t);
            let (nl, nr) = (left.len() as u128, right.len() as u128);
            let sl: u128 = counts(&left, y, k).iter().map(|c| c * c).sum();
            let sr: u128 = counts(&right, y, k).iter().map(|c| c * c).sum();
            let (num, den) = (sl * nr + sr * nl, nl * nr);
            let better = match &best {
                None => true,
                Some((bn, bd, _, _)) => num * bd > bn * den,
            };
            if better {
                best = Some((num, den, left, right));
            }
        }
    }
    match best {
        Some((num, den, left, right)) if num * n > parent_sq * den => {
            grow(x, y, k, &left, depth_left - 1, out);
            grow(x, y, k, &right, depth_left - 1, out);
        }
        _ => leaf(out),
    }
}
