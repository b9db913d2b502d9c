//! Multi-dataset classification benchmark: a CSV registry, cross-validated
//! accuracy per (model, dataset), min-max normalization across datasets,
//! and a ranked leaderboard.

pub mod artifact;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod leaderboard;
pub mod registry;
pub mod run;
pub mod scoring;
pub mod zoo;

pub use artifact::{train_model, ModelArtifact, FORMAT_VERSION};
pub use error::{BenchError, Result};
pub use eval::{evaluate_model_on_dataset, CellScore, EvalProtocol};
pub use ingest::{ingest_csv, EncodedDataset, EncodingReport};
pub use leaderboard::{build_leaderboard, Generator, Leaderboard, LeaderboardRow};
pub use registry::{load_registry, ColumnKind, DatasetSpec};
pub use run::{load_results, run_benchmark, write_artifacts, BenchResults, RunConfig, RunMeta};
pub use scoring::{aggregate_minmax, average_rank, fractional_ranks, minmax_normalize, normalize_grid, ScoreGrid, ScoreTable};
pub use zoo::{lookup, model_zoo, select_models, ModelEntry};
