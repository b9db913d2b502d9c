/// Per-sample mode over ensemble member predictions.
///
/// `predictions[m][i]` is member `m`'s class for sample `i`. Ties resolve to
/// the lowest class index, as a first-maximum argmax over class counts does.
pub fn plurality_vote(predictions: &[Vec<usize>], n_classes: usize) -> Vec<usize> {
    let n = predictions.first().map_or(0, Vec::len);
    let mut counts = vec![0usize; n_classes];
    (0..n)
        .map(|i| {
            counts.iter_mut().for_each(|c| *c = 0);
            for member in predictions {
                counts[member[i]] += 1;
            }
            let mut best = 0;
            for c in 1..n_classes {
                if counts[c] > counts[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}
