//! CSV ingestion and feature encoding.
//!
//! Numeric columns are parsed as reals and blanks take the column median.
//! Categorical columns are one-hot encoded over the categories seen in the
//! whole file (sorted), plus a trailing "missing" indicator column when the
//! column has blanks. The target column is label-encoded. The encoding is
//! fit on the full file, before any cross-validation split; it never looks
//! at the target.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tabstack::{encode_labels, ClassSet, FeatureMatrix, LabelVector};

use crate::error::{BenchError, Result};
use crate::registry::{ColumnKind, DatasetSpec};

/// Raw string cells, header first. Cells are whitespace-trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub path: PathBuf,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> BenchError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => BenchError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => BenchError::Csv {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

pub fn read_header(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv_reader(path)?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?;
    if headers.is_empty() {
        return Err(BenchError::EmptyFile(path.to_path_buf()));
    }
    Ok(headers.iter().map(str::to_owned).collect())
}

pub fn read_table(path: &Path) -> Result<Table> {
    let headers = read_header(path)?;
    let mut reader = csv_reader(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        rows.push(record.iter().map(str::to_owned).collect());
    }
    if rows.is_empty() {
        return Err(BenchError::EmptyFile(path.to_path_buf()));
    }
    Ok(Table {
        path: path.to_path_buf(),
        headers,
        rows,
    })
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Numeric when every non-blank cell parses as a finite real.
pub fn infer_kind<'a>(cells: impl IntoIterator<Item = &'a str>) -> ColumnKind {
    let numeric = cells
        .into_iter()
        .filter(|c| !c.is_empty())
        .all(|c| parse_finite(c).is_some());
    if numeric {
        ColumnKind::Numeric
    } else {
        ColumnKind::Categorical
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindSource {
    Declared,
    Inferred,
}

/// How one source column became feature columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnEncoding {
    Numeric {
        name: String,
        source: KindSource,
        /// Value substituted for blank cells.
        median: f64,
        imputed: usize,
    },
    Categorical {
        name: String,
        source: KindSource,
        /// One output column per category, in this order.
        categories: Vec<String>,
        /// Whether a final indicator column for blank cells follows.
        missing_column: bool,
        missing: usize,
    },
}

impl ColumnEncoding {
    pub fn name(&self) -> &str {
        match self {
            ColumnEncoding::Numeric { name, .. } | ColumnEncoding::Categorical { name, .. } => name,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            ColumnEncoding::Numeric { .. } => 1,
            ColumnEncoding::Categorical {
                categories,
                missing_column,
                ..
            } => categories.len() + usize::from(*missing_column),
        }
    }

    fn encode_cell(&self, cell: &str, out: &mut [f64]) -> std::result::Result<(), ()> {
        match self {
            ColumnEncoding::Numeric { median, .. } => {
                out[0] = if cell.is_empty() { *median } else { parse_finite(cell).ok_or(())? };
            }
            ColumnEncoding::Categorical {
                categories,
                missing_column,
                ..
            } => {
                out.fill(0.0);
                if cell.is_empty() {
                    if *missing_column {
                        out[categories.len()] = 1.0;
                    }
                } else if let Ok(i) = categories.binary_search_by(|c| c.as_str().cmp(cell)) {
                    out[i] = 1.0;
                }
                // unseen categories encode as all zeros
            }
        }
        Ok(())
    }
}

/// Every transformation applied to a file, sufficient to re-encode new rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingReport {
    pub target: String,
    pub classes: Vec<String>,
    pub columns: Vec<ColumnEncoding>,
    pub rows: usize,
}

impl EncodingReport {
    pub fn width(&self) -> usize {
        self.columns.iter().map(ColumnEncoding::width).sum()
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.width());
        for col in &self.columns {
            match col {
                ColumnEncoding::Numeric { name, .. } => names.push(name.clone()),
                ColumnEncoding::Categorical {
                    name,
                    categories,
                    missing_column,
                    ..
                } => {
                    names.extend(categories.iter().map(|c| format!("{name}={c}")));
                    if *missing_column {
                        names.push(format!("{name}=<missing>"));
                    }
                }
            }
        }
        names
    }

    /// Re-applies the stored encoding to new rows. The table must have
    /// exactly the training feature columns, in any order; the target column
    /// may be present and is ignored.
    pub fn transform(&self, table: &Table) -> Result<FeatureMatrix> {
        let mut positions = Vec::with_capacity(self.columns.len());
        for col in &self.columns {
            let idx = table
                .column_index(col.name())
                .ok_or_else(|| BenchError::SchemaMismatch(format!("missing column `{}`", col.name())))?;
            positions.push(idx);
        }
        if let Some(extra) = table
            .headers
            .iter()
            .find(|h| *h != &self.target && !self.columns.iter().any(|c| c.name() == h.as_str()))
        {
            return Err(BenchError::SchemaMismatch(format!("unexpected column `{extra}`")));
        }

        let width = self.width();
        let mut x = FeatureMatrix::zeros(table.rows.len(), width);
        for (r, row) in table.rows.iter().enumerate() {
            let out = x.row_mut(r);
            let mut offset = 0;
            for (col, &idx) in self.columns.iter().zip(&positions) {
                let w = col.width();
                col.encode_cell(&row[idx], &mut out[offset..offset + w]).map_err(|_| {
                    BenchError::SchemaMismatch(format!(
                        "column `{}` was numeric at training time but row {} holds `{}`",
                        col.name(),
                        r + 1,
                        row[idx]
                    ))
                })?;
                offset += w;
            }
        }
        Ok(x)
    }
}

#[derive(Debug, Clone)]
pub struct EncodedDataset {
    pub id: String,
    pub x: FeatureMatrix,
    pub y: LabelVector,
    pub classes: ClassSet,
    pub report: EncodingReport,
}

pub fn ingest_csv(spec: &DatasetSpec) -> Result<EncodedDataset> {
    let table = read_table(&spec.path)?;
    encode_table(&spec.id, &table, &spec.target_column, &spec.columns)
}

/// Fits the encoding on `table` and applies it. Columns missing from
/// `kinds` have their kind inferred.
pub fn encode_table(
    id: &str,
    table: &Table,
    target: &str,
    kinds: &BTreeMap<String, ColumnKind>,
) -> Result<EncodedDataset> {
    let unknown = |column: &str| BenchError::UnknownColumn {
        dataset: id.to_owned(),
        column: column.to_owned(),
        path: table.path.clone(),
    };
    let target_idx = table.column_index(target).ok_or_else(|| unknown(target))?;
    if let Some(c) = kinds.keys().find(|c| table.column_index(c).is_none()) {
        return Err(unknown(c));
    }

    let mut raw_labels = Vec::with_capacity(table.rows.len());
    for (r, row) in table.rows.iter().enumerate() {
        if row[target_idx].is_empty() {
            return Err(BenchError::BlankTarget {
                path: table.path.clone(),
                row: r + 1,
                column: target.to_owned(),
            });
        }
        raw_labels.push(row[target_idx].as_str());
    }
    let (classes, y) = encode_labels(&raw_labels).map_err(|source| BenchError::Target {
        path: table.path.clone(),
        column: target.to_owned(),
        source,
    })?;

    let mut columns = Vec::new();
    for (j, name) in table.headers.iter().enumerate() {
        if j == target_idx {
            continue;
        }
        let cells = || table.rows.iter().map(move |row| row[j].as_str());
        let (kind, source) = match kinds.get(name) {
            Some(&k) => (k, KindSource::Declared),
            None => (infer_kind(cells()), KindSource::Inferred),
        };
        let blanks = cells().filter(|c| c.is_empty()).count();
        columns.push(match kind {
            ColumnKind::Numeric => {
                let mut values = Vec::with_capacity(table.rows.len());
                for (r, cell) in cells().enumerate() {
                    if cell.is_empty() {
                        continue;
                    }
                    values.push(parse_finite(cell).ok_or_else(|| BenchError::UnparseableCell {
                        path: table.path.clone(),
                        row: r + 1,
                        column: name.clone(),
                        value: cell.to_owned(),
                    })?);
                }
                ColumnEncoding::Numeric {
                    name: name.clone(),
                    source,
                    median: median(values),
                    imputed: blanks,
                }
            }
            ColumnKind::Categorical => {
                let categories: BTreeSet<&str> = cells().filter(|c| !c.is_empty()).collect();
                ColumnEncoding::Categorical {
                    name: name.clone(),
                    source,
                    categories: categories.into_iter().map(str::to_owned).collect(),
                    missing_column: blanks > 0,
                    missing: blanks,
                }
            }
        });
    }

    let report = EncodingReport {
        target: target.to_owned(),
        classes: classes.labels().to_vec(),
        columns,
        rows: table.rows.len(),
    };
    let x = report.transform(table)?;
    Ok(EncodedDataset {
        id: id.to_owned(),
        x,
        y,
        classes,
        report,
    })
}
