use tabstack::{FeatureMatrix, LabelVector};

/// Classic two-class perceptron on raw features. Returns the training
/// accuracy after at most `epochs` passes; reaching 1.0 certifies that the
/// data is linearly separable.
pub fn perceptron_accuracy(x: &FeatureMatrix, y: &LabelVector, epochs: usize) -> f64 {
    let f = x.n_cols();
    let mut w = vec![0.0; f];
    let mut b = 0.0;
    let sign = |c: usize| if c == 1 { 1.0 } else { -1.0 };
    let score = |w: &[f64], b: f64, row: &[f64]| b + w.iter().zip(row).map(|(a, v)| a * v).sum::<f64>();
    for _ in 0..epochs {
        let mut mistakes = 0;
        for (row, &c) in x.rows().zip(y.indices()) {
            let t = sign(c);
            if t * score(&w, b, row) <= 0.0 {
                for (wj, v) in w.iter_mut().zip(row) {
                    *wj += t * v;
                }
                b += t;
                mistakes += 1;
            }
        }
        if mistakes == 0 {
            break;
        }
    }
    let hits = x
        .rows()
        .zip(y.indices())
        .filter(|(row, &c)| sign(c) * score(&w, b, row) > 0.0)
        .count();
    hits as f64 / x.n_rows() as f64
}
