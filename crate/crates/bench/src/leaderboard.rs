use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::scoring::{aggregate_minmax, average_rank, normalize_grid, ScoreGrid, ScoreTable};

/// Who designed a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    User,
    System,
    Baseline,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::User => "User",
            Generator::System => "System",
            Generator::Baseline => "Baseline",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub rank: usize,
    pub model: String,
    pub minmax: f64,
    pub mean_rank: f64,
    pub generator: Generator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaderboard {
    pub rows: Vec<LeaderboardRow>,
    pub n_datasets: usize,
}

/// Normalizes, aggregates and ranks. Rows are sorted by MinMax descending,
/// ties alphabetically; ranks are dense and tied scores share a rank.
pub fn build_leaderboard(raw: &ScoreGrid, generators: &BTreeMap<String, Generator>) -> Result<(Leaderboard, ScoreTable)> {
    let table = normalize_grid(raw)?;
    let minmax = aggregate_minmax(&table)?;
    let mean_rank = average_rank(raw)?;

    let mut rows: Vec<LeaderboardRow> = minmax
        .into_iter()
        .map(|(model, score)| {
            let generator = *generators
                .get(&model)
                .ok_or_else(|| BenchError::UnknownModel(model.clone()))?;
            Ok(LeaderboardRow {
                rank: 0,
                mean_rank: mean_rank[&model],
                model,
                minmax: score,
                generator,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| b.minmax.total_cmp(&a.minmax).then_with(|| a.model.cmp(&b.model)));

    let mut rank = 0;
    let mut previous = None;
    for row in &mut rows {
        if previous != Some(row.minmax) {
            rank += 1;
            previous = Some(row.minmax);
        }
        row.rank = rank;
    }
    let n_datasets = raw.datasets().len();
    Ok((Leaderboard { rows, n_datasets }, table))
}

impl Leaderboard {
    /// Aligned text table: Rank, Model, MinMax (4 decimals), Generator.
    pub fn render(&self) -> String {
        let model_width = self.rows.iter().map(|r| r.model.len()).max().unwrap_or(0).max("Model".len());
        let mut out = format!("{:<4}  {:<model_width$}  {:>6}  Generator\n", "Rank", "Model", "MinMax");
        for r in &self.rows {
            out.push_str(&format!(
                "{:<4}  {:<model_width$}  {:>6.4}  {}\n",
                r.rank, r.model, r.minmax, r.generator
            ));
        }
        out.push_str(&format!("({} datasets)\n", self.n_datasets));
        out
    }
}
