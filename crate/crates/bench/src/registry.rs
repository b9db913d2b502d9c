//! Dataset registry: a TOML manifest listing CSV files and their targets.
//!
//! ```toml
//! [[dataset]]
//! id = "iris"
//! path = "iris.csv"          # relative to the manifest
//! target = "class"
//! provenance = "free text"
//!
//! [dataset.columns]          # optional; unlisted columns are inferred
//! petal_width = "numeric"
//! ```

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{io_error, BenchError, Result};
use crate::ingest::read_header;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSpec {
    pub id: String,
    /// Resolved against the manifest directory.
    pub path: PathBuf,
    pub target_column: String,
    /// Explicit column kinds; columns absent here are inferred at ingest.
    pub columns: BTreeMap<String, ColumnKind>,
    pub provenance: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    dataset: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    id: String,
    path: PathBuf,
    target: String,
    #[serde(default)]
    provenance: String,
    #[serde(default)]
    columns: BTreeMap<String, ColumnKind>,
}

/// Parses and validates a manifest. Specs come back in manifest order.
pub fn load_registry(manifest: &Path) -> Result<Vec<DatasetSpec>> {
    let text = std::fs::read_to_string(manifest).map_err(io_error(manifest))?;
    let parsed: Manifest = toml::from_str(&text).map_err(|e| BenchError::Manifest {
        path: manifest.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = manifest.parent().unwrap_or(Path::new(""));

    let mut seen = HashSet::new();
    let mut specs = Vec::with_capacity(parsed.dataset.len());
    for entry in parsed.dataset {
        if !seen.insert(entry.id.clone()) {
            return Err(BenchError::DuplicateId(entry.id));
        }
        let path = base.join(&entry.path);
        if !path.is_file() {
            return Err(BenchError::MissingFile { id: entry.id, path });
        }
        let header = read_header(&path)?;
        let declared = std::iter::once(&entry.target).chain(entry.columns.keys());
        if let Some(column) = declared.into_iter().find(|c| !header.contains(c)) {
            return Err(BenchError::UnknownColumn {
                dataset: entry.id,
                column: column.clone(),
                path,
            });
        }
        specs.push(DatasetSpec {
            id: entry.id,
            path,
            target_column: entry.target,
            columns: entry.columns,
            provenance: entry.provenance,
        });
    }
    Ok(specs)
}
