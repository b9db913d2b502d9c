//! Full benchmark runs: ingest every dataset, evaluate the (model, dataset)
//! grid in parallel, build the leaderboard, write artifacts.
//!
//! `results.json` depends only on the registry contents, model selection,
//! fold count and seed. Wall-clock times and the worker count go to
//! `run_meta.json` so the results stay byte-identical across reruns.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{io_error, BenchError, Result};
use crate::eval::{evaluate_model_on_dataset, CellScore, EvalProtocol};
use crate::ingest::{ingest_csv, EncodedDataset};
use crate::leaderboard::{build_leaderboard, Generator, Leaderboard};
use crate::registry::load_registry;
use crate::scoring::{ScoreGrid, ScoreTable};
use crate::zoo::ModelEntry;
use tabstack::SeedSpec;

pub const RESULTS_VERSION: u32 = 1;
pub const RESULTS_FILE: &str = "results.json";
pub const TABLE_FILE: &str = "leaderboard.txt";
pub const META_FILE: &str = "run_meta.json";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub registry: PathBuf,
    pub models: Vec<ModelEntry>,
    pub folds: usize,
    pub seed: SeedSpec,
    pub workers: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(BenchError::Protocol("worker count must be at least 1".into()));
        }
        if self.models.len() < 2 {
            return Err(BenchError::Protocol(
                "min-max normalization needs at least 2 models".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub id: String,
    pub generator: Generator,
    pub hyperparameters: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub sha256: String,
    pub rows: usize,
    pub source_features: usize,
    pub encoded_features: usize,
    pub classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Ok(CellScore),
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub model: String,
    pub dataset: String,
    #[serde(flatten)]
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResults {
    pub format_version: u32,
    pub seed: u64,
    pub folds: usize,
    pub models: Vec<ModelRecord>,
    pub datasets: Vec<DatasetRecord>,
    /// Model-major, in selection then registry order.
    pub cells: Vec<CellRecord>,
    /// Models with at least one failed cell; they are left out of the
    /// leaderboard rather than imputed.
    pub excluded_models: Vec<String>,
    pub scores: Option<ScoreTable>,
    pub leaderboard: Option<Leaderboard>,
    pub leaderboard_error: Option<String>,
}

impl BenchResults {
    pub fn failures(&self) -> impl Iterator<Item = &CellRecord> {
        self.cells
            .iter()
            .filter(|c| matches!(c.outcome, CellOutcome::Failed { .. }))
    }

    pub fn is_complete(&self) -> bool {
        self.failures().next().is_none() && self.leaderboard.is_some()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("results serialize");
        text.push('\n');
        text
    }
}

/// Non-deterministic facts about a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub elapsed_ms: u128,
    pub workers: usize,
    pub registry: String,
    pub version: String,
}

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(io_error(path))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Runs the benchmark. Registry and ingest problems are errors; model
/// failures on individual cells are recorded in the results.
pub fn run_benchmark(config: &RunConfig) -> Result<(BenchResults, RunMeta)> {
    config.validate()?;
    let started = unix_ms();
    let clock = Instant::now();
    let seed = config.seed.resolve();
    let protocol = EvalProtocol {
        folds: config.folds,
        seed: SeedSpec::fixed(seed),
    };
    protocol.validate()?;

    let specs = load_registry(&config.registry)?;
    let mut data: Vec<EncodedDataset> = Vec::with_capacity(specs.len());
    let mut datasets = Vec::with_capacity(specs.len());
    for spec in &specs {
        let encoded = ingest_csv(spec)?;
        datasets.push(DatasetRecord {
            id: spec.id.clone(),
            sha256: file_digest(&spec.path)?,
            rows: encoded.x.n_rows(),
            source_features: encoded.report.columns.len(),
            encoded_features: encoded.x.n_cols(),
            classes: encoded.classes.labels().to_vec(),
        });
        log::info!("ingested {} ({} rows, {} features)", spec.id, encoded.x.n_rows(), encoded.x.n_cols());
        data.push(encoded);
    }

    let prototypes: Vec<_> = config.models.iter().map(|m| m.build()).collect();
    let grid: Vec<(usize, usize)> = (0..config.models.len())
        .flat_map(|m| (0..data.len()).map(move |d| (m, d)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| BenchError::Protocol(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<CellOutcome> = pool.install(|| {
        grid.par_iter()
            .map(|&(m, d)| {
                let id = config.models[m].id;
                match evaluate_model_on_dataset(id, prototypes[m].as_ref(), &data[d], &protocol) {
                    Ok(score) => {
                        log::info!("{id} on {}: {:.4}", data[d].id, score.accuracy);
                        CellOutcome::Ok(score)
                    }
                    Err(e) => {
                        log::warn!("{e}");
                        CellOutcome::Failed { error: e.to_string() }
                    }
                }
            })
            .collect()
    });

    let cells: Vec<CellRecord> = grid
        .iter()
        .zip(outcomes)
        .map(|(&(m, d), outcome)| CellRecord {
            model: config.models[m].id.to_owned(),
            dataset: data[d].id.clone(),
            outcome,
        })
        .collect();

    let excluded: BTreeSet<String> = cells
        .iter()
        .filter(|c| matches!(c.outcome, CellOutcome::Failed { .. }))
        .map(|c| c.model.clone())
        .collect();
    let mut raw = ScoreGrid::new();
    for c in &cells {
        if let (false, CellOutcome::Ok(s)) = (excluded.contains(&c.model), &c.outcome) {
            raw.insert(&c.model, &c.dataset, s.accuracy);
        }
    }
    let generators: BTreeMap<String, Generator> = config
        .models
        .iter()
        .map(|m| (m.id.to_owned(), m.generator))
        .collect();
    let (leaderboard, scores, leaderboard_error) = if data.is_empty() {
        (None, None, Some("registry lists no datasets".to_owned()))
    } else if raw.models().len() < 2 {
        let message = format!(
            "{} model(s) completed every dataset; normalization needs at least 2",
            raw.models().len()
        );
        (None, None, Some(message))
    } else {
        match build_leaderboard(&raw, &generators) {
            Ok((board, table)) => (Some(board), Some(table), None),
            Err(e) => (None, None, Some(e.to_string())),
        }
    };

    let results = BenchResults {
        format_version: RESULTS_VERSION,
        seed,
        folds: config.folds,
        models: config
            .models
            .iter()
            .zip(&prototypes)
            .map(|(m, p)| ModelRecord {
                id: m.id.to_owned(),
                generator: m.generator,
                hyperparameters: p.hyperparameters(),
            })
            .collect(),
        datasets,
        cells,
        excluded_models: excluded.into_iter().collect(),
        scores,
        leaderboard,
        leaderboard_error,
    };
    let meta = RunMeta {
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        elapsed_ms: clock.elapsed().as_millis(),
        workers: config.workers,
        registry: config.registry.display().to_string(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
    };
    Ok((results, meta))
}

/// Writes `results.json`, then the text leaderboard, then `run_meta.json`.
pub fn write_artifacts(results: &BenchResults, meta: &RunMeta, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(io_error(out_dir))?;
    let write = |name: &str, body: String| {
        let path = out_dir.join(name);
        std::fs::write(&path, body).map_err(io_error(path))
    };
    write(RESULTS_FILE, results.to_json())?;
    write(TABLE_FILE, render_report(results))?;
    let mut meta_text = serde_json::to_string_pretty(meta).expect("meta serializes");
    meta_text.push('\n');
    write(META_FILE, meta_text)
}

/// Human-readable summary of a results document.
pub fn render_report(results: &BenchResults) -> String {
    let mut out = match &results.leaderboard {
        Some(board) => board.render(),
        None => format!(
            "no leaderboard: {}\n",
            results.leaderboard_error.as_deref().unwrap_or("unknown reason")
        ),
    };
    let failures: Vec<&CellRecord> = results.failures().collect();
    if !failures.is_empty() {
        out.push_str("\nFailed cells:\n");
        for c in failures {
            if let CellOutcome::Failed { error } = &c.outcome {
                out.push_str(&format!("  {} / {}: {}\n", c.model, c.dataset, error));
            }
        }
    }
    out
}

pub fn load_results(path: &Path) -> Result<BenchResults> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| BenchError::Artifact(e.to_string()))?;
    let found = value.get("format_version").and_then(Value::as_u64).unwrap_or(0) as u32;
    if found != RESULTS_VERSION {
        return Err(BenchError::VersionMismatch {
            expected: RESULTS_VERSION,
            found,
        });
    }
    serde_json::from_value(value).map_err(|e| BenchError::Artifact(e.to_string()))
}
