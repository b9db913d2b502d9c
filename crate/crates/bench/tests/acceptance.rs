//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Every count and tolerance is pinned
//! below.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use tabstack::learners::logistic::softmax_loss_gradient;
use tabstack::{
    apply_directions, compute_directions, fit_tree, oof_meta_features, plurality_vote, Classifier, DecisionTree,
    DirectionalForest, LogisticRegression, MaxFeatures, MetaSynthesis, RandomForest, SeedSpec,
    StackingConfig, TreeParams,
};
use tabstack_bench::{
    build_leaderboard, fractional_ranks, ingest_csv, load_registry, minmax_normalize, normalize_grid,
    aggregate_minmax, average_rank, run_benchmark, select_models, Generator, RunConfig, ScoreGrid,
};
use tabstack_testkit::datasets::{informative_table, negate_columns, random_table, rng, with_zero_direction_columns};
use tabstack_testkit::tree_oracle::brute_force_predictions;
use tabstack_testkit::{Memorizer, Outcome};

const LEAKAGE_DATASETS: usize = 50;
const LEAKAGE_MAX_ROWS: usize = 60;
const LEAKAGE_BUDGET: Duration = Duration::from_secs(10);

const DIRECTION_INSTANCES: usize = 100;
const DIRECTION_BUDGET: Duration = Duration::from_secs(30);

const SPLIT_CASES: usize = 200;
const SPLIT_MAX_ROWS: usize = 20;
const SPLIT_MAX_FEATURES: usize = 3;
const SPLIT_MAX_DEPTH: usize = 2;
const SPLIT_BUDGET: Duration = Duration::from_secs(60);

const GRADIENT_INSTANCES: usize = 20;
const GRADIENT_MAX_ROWS: usize = 50;
const GRADIENT_MAX_FEATURES: usize = 5;
const GRADIENT_MAX_CLASSES: usize = 4;
const GRADIENT_STEP: f64 = 1e-5;
const GRADIENT_TOLERANCE: f64 = 1e-4;
/// Floor of the relative-error denominator `max(|analytic|, |numeric|, floor)`.
const GRADIENT_FLOOR: f64 = 1e-8;

const SCORING_TRIALS: usize = 1000;
const SCORING_MAX_MODELS: usize = 4;
const SCORING_MAX_DATASETS: usize = 3;

const PROBA_TOLERANCE: f64 = 1e-9;
const AFFINE_TOLERANCE: f64 = 1e-12;

const BENCH_SEED: u64 = 42;
const BENCH_FOLDS: usize = 5;
const BENCH_MIN_DATASETS: usize = 6;
const FOREST_MARGIN: f64 = 0.02;
const BENCH_BUDGET: Duration = Duration::from_secs(300);

fn registry() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../datasets/registry.toml")
}

fn timed(budget: Duration, outcome: Outcome, started: Instant) -> Outcome {
    let elapsed = started.elapsed();
    if !outcome.passed {
        return outcome;
    }
    if elapsed > budget {
        return Outcome::fail(format!("{} but took {:.1?} (budget {:?})", outcome.detail, elapsed, budget));
    }
    Outcome::pass(format!("{} in {:.1?}", outcome.detail, elapsed))
}

/// 1. Out-of-fold meta-features of a memorizing base never mark a row as seen.
fn no_leakage() -> Outcome {
    let started = Instant::now();
    let mut r = rng(1001);
    let mut rows_checked = 0;
    for i in 0..LEAKAGE_DATASETS {
        let cv = *[2usize, 3, 5].choose(&mut r).unwrap();
        let k = r.gen_range(2..=3);
        let n = r.gen_range(cv * k..=LEAKAGE_MAX_ROWS);
        let f = r.gen_range(1..=4);
        // continuous features, so no two rows coincide
        let (x, y) = random_table(r.gen(), n, f, k, cv, None);
        let config = StackingConfig {
            base_estimators: vec![Box::new(Memorizer::default()), Box::new(DecisionTree::default())],
            meta_estimator: Box::new(LogisticRegression::default()),
            cv,
            use_original_features: r.gen_bool(0.5),
            seed: SeedSpec::fixed(r.gen()),
            ..StackingConfig::default()
        };
        let z = match oof_meta_features(&x, &y, &config) {
            Ok(z) => z,
            Err(e) => return Outcome::fail(format!("dataset {i}: {e}")),
        };
        let col = z.blocks.iter().take_while(|b| b.estimator != Some(0)).map(|b| b.width).sum::<usize>();
        for row in 0..n {
            rows_checked += 1;
            if z.values.get(row, col) != 0.0 {
                return Outcome::fail(format!("dataset {i} (cv={cv}): row {row} was seen by its own base model"));
            }
        }
    }
    timed(
        LEAKAGE_BUDGET,
        Outcome::pass(format!("{LEAKAGE_DATASETS} datasets, all {rows_checked} rows unseen")),
        started,
    )
}

/// 2. Sign-flip invariance and zero-direction nullity.
fn direction_invariances() -> Outcome {
    let started = Instant::now();
    let mut r = rng(2002);
    for i in 0..DIRECTION_INSTANCES {
        let k = r.gen_range(2..=4);
        let informative = r.gen_range(1..=5);
        let data = with_zero_direction_columns(r.gen(), k, 4 * r.gen_range(2..=5), informative);
        let f = data.x.n_cols();
        let seed = r.gen();
        let test = random_table(r.gen(), 25, f, 2, 0, None).0;

        let mut base = DirectionalForest::new(15, SeedSpec::fixed(seed));
        if let Err(e) = base.fit(&data.x, &data.y) {
            return Outcome::fail(format!("instance {i}: {e}"));
        }
        let d = base.directions().unwrap().clone();
        if data.zero_columns.iter().any(|&c| d.entries()[c] != 0) {
            return Outcome::fail(format!("instance {i}: designed zero column got a non-zero direction"));
        }

        let flipped: Vec<usize> = (0..f).filter(|_| r.gen_bool(0.5)).collect();
        let mut mirror = DirectionalForest::new(15, SeedSpec::fixed(seed));
        mirror.fit(&negate_columns(&data.x, &flipped), &data.y).unwrap();
        let expected = base.predict(&test).unwrap();
        if mirror.predict(&negate_columns(&test, &flipped)).unwrap() != expected {
            return Outcome::fail(format!("instance {i}: negating columns {flipped:?} changed predictions"));
        }

        let mut perturbed = test.clone();
        for row in 0..perturbed.n_rows() {
            for &c in &data.zero_columns {
                perturbed.set(row, c, r.gen_range(-1e6..1e6));
            }
        }
        if base.predict(&perturbed).unwrap() != expected {
            return Outcome::fail(format!("instance {i}: perturbing zero-direction columns changed predictions"));
        }
    }
    timed(
        DIRECTION_BUDGET,
        Outcome::pass(format!("{DIRECTION_INSTANCES} instances exact")),
        started,
    )
}

/// 3. Greedy split search equals exhaustive re-partitioning.
fn split_search_oracle() -> Outcome {
    let started = Instant::now();
    let mut r = rng(3003);
    for i in 0..SPLIT_CASES {
        let k = r.gen_range(2..=3);
        let n = r.gen_range(k..=SPLIT_MAX_ROWS);
        let f = r.gen_range(1..=SPLIT_MAX_FEATURES);
        let depth = r.gen_range(0..=SPLIT_MAX_DEPTH);
        let levels = r.gen_bool(0.5).then_some(r.gen_range(2..=5));
        let (x, y) = random_table(r.gen(), n, f, k, 1, levels);
        let params = TreeParams {
            max_depth: Some(depth),
            ..TreeParams::default()
        };
        let tree = fit_tree(&x, &y, &params, r.gen()).unwrap();
        if tree.predict(&x) != brute_force_predictions(&x, &y, depth) {
            return Outcome::fail(format!("case {i} (n={n}, f={f}, depth={depth}) differs from brute force"));
        }
    }
    timed(SPLIT_BUDGET, Outcome::pass(format!("{SPLIT_CASES} cases identical")), started)
}

/// 4. Analytic logistic gradient against central differences.
fn gradient_check() -> Outcome {
    let mut r = rng(4004);
    let mut worst: f64 = 0.0;
    for _ in 0..GRADIENT_INSTANCES {
        let k = r.gen_range(2..=GRADIENT_MAX_CLASSES);
        let n = r.gen_range(k..=GRADIENT_MAX_ROWS);
        let f = r.gen_range(1..=GRADIENT_MAX_FEATURES);
        let (x, y) = random_table(r.gen(), n, f, k, 1, None);
        let w: Vec<f64> = (0..k * f).map(|_| r.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..k).map(|_| r.gen_range(-1.0..1.0)).collect();
        let l2 = 1e-2;
        let (_, gw, gb) = softmax_loss_gradient(&x, &y, &w, &b, l2);
        let loss = |w: &[f64], b: &[f64]| softmax_loss_gradient(&x, &y, w, b, l2).0;
        let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(GRADIENT_FLOOR);
        for i in 0..w.len() {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[i] += GRADIENT_STEP;
            down[i] -= GRADIENT_STEP;
            let numeric = (loss(&up, &b) - loss(&down, &b)) / (2.0 * GRADIENT_STEP);
            worst = worst.max(rel(gw[i], numeric));
        }
        for i in 0..b.len() {
            let (mut up, mut down) = (b.clone(), b.clone());
            up[i] += GRADIENT_STEP;
            down[i] -= GRADIENT_STEP;
            let numeric = (loss(&w, &up) - loss(&w, &down)) / (2.0 * GRADIENT_STEP);
            worst = worst.max(rel(gb[i], numeric));
        }
    }
    let detail = format!("{GRADIENT_INSTANCES} instances, max relative error {worst:.2e} (limit {GRADIENT_TOLERANCE:.0e})");
    if worst <= GRADIENT_TOLERANCE {
        Outcome::pass(detail)
    } else {
        Outcome::fail(detail)
    }
}

/// Straightforward re-implementation of the scoring formulas.
mod oracle {
    pub fn normalize(scores: &[f64]) -> Vec<f64> {
        let mut lo = scores[0];
        let mut hi = scores[0];
        for &s in scores {
            if s < lo {
                lo = s;
            }
            if s > hi {
                hi = s;
            }
        }
        scores
            .iter()
            .map(|&s| if hi == lo { 1.0 } else { (s - lo) / (hi - lo) })
            .collect()
    }

    /// Sort descending, then give each run of equal scores the mean of its
    /// 1-based positions.
    pub fn ranks(scores: &[f64]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
        let mut out = vec![0.0; scores.len()];
        let mut start = 0;
        while start < order.len() {
            let mut end = start;
            while end + 1 < order.len() && scores[order[end + 1]] == scores[order[start]] {
                end += 1;
            }
            let mean = ((start + 1) + (end + 1)) as f64 / 2.0;
            for &i in &order[start..=end] {
                out[i] = mean;
            }
            start = end + 1;
        }
        out
    }

    pub fn mean(values: &[f64]) -> f64 {
        let mut total = 0.0;
        for v in values {
            total += v;
        }
        total / values.len() as f64
    }
}

/// 5. Scoring pipeline against the oracle on small random grids.
fn scoring_oracle() -> Outcome {
    let mut r = rng(5005);
    for trial in 0..SCORING_TRIALS {
        let n_models = r.gen_range(2..=SCORING_MAX_MODELS);
        let n_datasets = r.gen_range(1..=SCORING_MAX_DATASETS);
        let models: Vec<String> = (0..n_models).map(|m| format!("m{m}")).collect();
        let datasets: Vec<String> = (0..n_datasets).map(|d| format!("d{d}")).collect();
        // coarse grids force ties, fine grids exercise rounding
        let coarse = r.gen_bool(0.4);
        let mut raw = vec![vec![0.0; n_datasets]; n_models];
        let mut grid = ScoreGrid::new();
        for (m, row) in raw.iter_mut().enumerate() {
            for (d, cell) in row.iter_mut().enumerate() {
                *cell = if coarse { f64::from(r.gen_range(0u32..=4)) / 4.0 } else { r.gen::<f64>() };
                grid.insert(&models[m], &datasets[d], *cell);
            }
        }
        let table = normalize_grid(&grid).unwrap();
        let minmax = aggregate_minmax(&table).unwrap();
        let mean_rank = average_rank(&grid).unwrap();

        let mut normalized = vec![vec![0.0; n_datasets]; n_models];
        let mut ranks = vec![vec![0.0; n_datasets]; n_models];
        for d in 0..n_datasets {
            let column: Vec<f64> = raw.iter().map(|row| row[d]).collect();
            if minmax_normalize(&datasets[d], &column).unwrap() != oracle::normalize(&column) {
                return Outcome::fail(format!("trial {trial}: normalization of {column:?}"));
            }
            if fractional_ranks(&column) != oracle::ranks(&column) {
                return Outcome::fail(format!("trial {trial}: ranks of {column:?}"));
            }
            for (m, (n, rk)) in oracle::normalize(&column).into_iter().zip(oracle::ranks(&column)).enumerate() {
                normalized[m][d] = n;
                ranks[m][d] = rk;
            }
        }
        for m in 0..n_models {
            let id = &models[m];
            for d in 0..n_datasets {
                if table.normalized.get(id, &datasets[d]).unwrap().to_bits() != normalized[m][d].to_bits() {
                    return Outcome::fail(format!("trial {trial}: normalized grid cell {id}/{}", datasets[d]));
                }
            }
            if minmax[id].to_bits() != oracle::mean(&normalized[m]).to_bits() {
                return Outcome::fail(format!("trial {trial}: MinMax of {id}"));
            }
            if mean_rank[id].to_bits() != oracle::mean(&ranks[m]).to_bits() {
                return Outcome::fail(format!("trial {trial}: mean rank of {id}"));
            }
        }

        let tags: BTreeMap<String, Generator> = models.iter().map(|m| (m.clone(), Generator::Baseline)).collect();
        let (board, _) = build_leaderboard(&grid, &tags).unwrap();
        let mut expected: Vec<(f64, &String)> = models.iter().enumerate().map(|(m, id)| (oracle::mean(&normalized[m]), id)).collect();
        expected.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(b.1)));
        let mut dense = 0;
        for (i, (row, (score, id))) in board.rows.iter().zip(&expected).enumerate() {
            if i == 0 || expected[i - 1].0 != *score {
                dense += 1;
            }
            if &row.model != *id || row.minmax.to_bits() != score.to_bits() || row.rank != dense {
                return Outcome::fail(format!("trial {trial}: leaderboard row {i}"));
            }
        }
    }
    Outcome::pass(format!(
        "{SCORING_TRIALS} grids up to {SCORING_MAX_MODELS}x{SCORING_MAX_DATASETS}, bitwise equal"
    ))
}

fn probabilistic_models() -> Vec<Box<dyn Classifier>> {
    vec![
        Box::new(DecisionTree::default()),
        Box::new(RandomForest::new(100, SeedSpec::fixed(6))),
        Box::new(LogisticRegression::default()),
        Box::new(MetaSynthesis::new(StackingConfig {
            seed: SeedSpec::fixed(6),
            ..StackingConfig::default()
        })),
    ]
}

/// 6. Normalization endpoints, affine invariance, degenerate rule, and
/// probability row sums on every bundled dataset.
fn normalization_invariants() -> Outcome {
    let mut r = rng(6006);
    for trial in 0..1000 {
        let k = r.gen_range(2..=6);
        let scores: Vec<f64> = (0..k).map(|_| f64::from(r.gen_range(0u32..=200)) / 200.0).collect();
        let n = minmax_normalize("d", &scores).unwrap();
        let lo = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (s, v) in scores.iter().zip(&n) {
            if lo < hi && ((*s == hi) != (*v == 1.0) || (*s == lo) != (*v == 0.0)) {
                return Outcome::fail(format!("trial {trial}: endpoints of {scores:?}"));
            }
            if lo == hi && *v != 1.0 {
                return Outcome::fail(format!("trial {trial}: degenerate {scores:?}"));
            }
        }
        let (a, b) = (r.gen_range(0.01..100.0), r.gen_range(-10.0..10.0));
        let mapped: Vec<f64> = scores.iter().map(|s| a * s + b).collect();
        let m = minmax_normalize("d", &mapped).unwrap();
        if n.iter().zip(&m).any(|(x, y)| (x - y).abs() > AFFINE_TOLERANCE) {
            return Outcome::fail(format!("trial {trial}: affine map ({a}, {b}) changed {scores:?}"));
        }
    }
    if minmax_normalize("d", &[0.9; 4]).unwrap() != [1.0; 4] {
        return Outcome::fail("all-tie dataset did not normalize to 1.0");
    }

    let specs = match load_registry(&registry()) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(e.to_string()),
    };
    let mut worst: f64 = 0.0;
    for spec in &specs {
        let data = ingest_csv(spec).unwrap();
        for mut model in probabilistic_models() {
            model.fit(&data.x, &data.y).unwrap();
            let p = model.predict_proba(&data.x).unwrap();
            for row in 0..p.n_rows() {
                worst = worst.max((p.row(row).iter().sum::<f64>() - 1.0).abs());
            }
        }
    }
    let detail = format!(
        "1000 invariant trials; max |row sum - 1| = {worst:.1e} over {} datasets x 4 models",
        specs.len()
    );
    if worst <= PROBA_TOLERANCE {
        Outcome::pass(detail)
    } else {
        Outcome::fail(detail)
    }
}

fn bench_config(workers: usize) -> RunConfig {
    RunConfig {
        registry: registry(),
        models: select_models("all").unwrap(),
        folds: BENCH_FOLDS,
        seed: SeedSpec::fixed(BENCH_SEED),
        workers,
    }
}

/// 7 and 8 share runs: the worker-1 run is timed for 7, then a worker-8
/// run is compared byte for byte.
fn ordering_and_determinism() -> (Outcome, Outcome) {
    let started = Instant::now();
    let first = run_benchmark(&bench_config(1));
    let elapsed = started.elapsed();
    let (first, _) = match first {
        Ok(v) => v,
        Err(e) => {
            let o = Outcome::fail(e.to_string());
            return (o.clone(), o);
        }
    };

    let ordering = match &first.leaderboard {
        None => Outcome::fail(format!("no leaderboard: {:?}", first.leaderboard_error)),
        Some(board) => {
            let score = |id: &str| board.rows.iter().find(|r| r.model == id).map(|r| r.minmax);
            match (
                score("meta_synthesis"),
                score("random_forest"),
                score("directional_forest"),
                score("logistic_regression"),
            ) {
                (Some(ms), Some(rf), Some(df), Some(lr)) => {
                    let mut failures = Vec::new();
                    if board.n_datasets < BENCH_MIN_DATASETS {
                        failures.push(format!("only {} datasets", board.n_datasets));
                    }
                    if ms < rf - FOREST_MARGIN {
                        failures.push(format!("meta_synthesis {ms:.4} < random_forest {rf:.4} - {FOREST_MARGIN}"));
                    }
                    if ms < lr {
                        failures.push(format!("meta_synthesis {ms:.4} < logistic_regression {lr:.4}"));
                    }
                    if df < lr {
                        failures.push(format!("directional_forest {df:.4} < logistic_regression {lr:.4}"));
                    }
                    if elapsed > BENCH_BUDGET {
                        failures.push(format!("run took {elapsed:.1?}"));
                    }
                    let summary = format!(
                        "MinMax ms={ms:.4} rf={rf:.4} df={df:.4} lr={lr:.4} on {} datasets in {elapsed:.1?}",
                        board.n_datasets
                    );
                    if failures.is_empty() {
                        Outcome::pass(summary)
                    } else {
                        Outcome::fail(format!("{summary}; {}", failures.join("; ")))
                    }
                }
                _ => Outcome::fail(format!("models missing from leaderboard, excluded: {:?}", first.excluded_models)),
            }
        }
    };

    let determinism = match run_benchmark(&bench_config(8)) {
        Err(e) => Outcome::fail(e.to_string()),
        Ok((second, _)) => {
            let (a, b) = (first.to_json(), second.to_json());
            if a == b {
                Outcome::pass(format!("workers 1 vs 8: results.json identical ({} bytes)", a.len()))
            } else {
                let at = a.bytes().zip(b.bytes()).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
                Outcome::fail(format!("workers 1 vs 8 differ at byte {at}"))
            }
        }
    };
    (ordering, determinism)
}

/// 9. Reductions.
fn reductions() -> Outcome {
    let params = TreeParams {
        max_features: MaxFeatures::All,
        ..TreeParams::default()
    };
    let mut cases = Vec::new();
    for seed in 0..20 {
        cases.push(informative_table(9000 + seed, 60, 5, 3));
    }
    for spec in load_registry(&registry()).unwrap() {
        let d = ingest_csv(&spec).unwrap();
        cases.push((d.x, d.y));
    }
    for (i, (x, y)) in cases.iter().enumerate() {
        let mut forest = DirectionalForest::new(1, SeedSpec::fixed(i as u64)).with_tree_params(params);
        forest.fit(x, y).unwrap();
        let oriented = apply_directions(x, &compute_directions(x, y).unwrap()).unwrap();
        let tree = fit_tree(&oriented, y, &params, 0).unwrap();
        if forest.predict(x).unwrap().indices() != tree.predict(&oriented).as_slice() {
            return Outcome::fail(format!("case {i}: single-tree directional forest differs from plain tree"));
        }
    }

    for (i, (x, y)) in cases.iter().enumerate() {
        let mut forest = RandomForest::new(25, SeedSpec::fixed(i as u64));
        forest.fit(x, y).unwrap();
        let p = forest.predict_proba(x).unwrap();
        if (0..p.n_rows()).any(|r| (p.row(r).iter().sum::<f64>() - 1.0).abs() > PROBA_TOLERANCE) {
            return Outcome::fail(format!("case {i}: forest probabilities not normalized"));
        }
    }

    let ties: [(&[&[usize]], usize, usize); 4] = [
        (&[&[0], &[0], &[1], &[1]], 2, 0),
        (&[&[2], &[1]], 3, 1),
        (&[&[3], &[1], &[3], &[1], &[2]], 4, 1),
        (&[&[2], &[0], &[1]], 3, 0),
    ];
    for (votes, k, expected) in ties {
        let per_tree: Vec<Vec<usize>> = votes.iter().map(|v| v.to_vec()).collect();
        if plurality_vote(&per_tree, k) != [expected] {
            return Outcome::fail(format!("tie {votes:?} did not resolve to {expected}"));
        }
    }
    Outcome::pass(format!("{} reduction cases, forest row sums, 4 constructed ties", cases.len()))
}

fn main() {
    // libtest-style flags (e.g. --nocapture, filters) are accepted and ignored
    let started = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "no leakage", no_leakage()),
        (2, "direction invariances", direction_invariances()),
        (3, "split-search oracle", split_search_oracle()),
        (4, "gradient check", gradient_check()),
        (5, "scoring oracle", scoring_oracle()),
        (6, "normalization invariants", normalization_invariants()),
    ];
    let (ordering, determinism) = ordering_and_determinism();
    results.push((7, "benchmark ordering", ordering));
    results.push((8, "determinism", determinism));
    results.push((9, "reductions", reductions()));

    let mut failed = 0;
    for (n, name, outcome) in &results {
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {n} [{verdict}] {name}: {}", outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1?})",
        results.len() - failed,
        started.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
