//! Versioned model files for train/predict on user CSVs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tabstack::{ClassSet, ModelSnapshot, SeedSpec};

use crate::error::{io_error, BenchError, Result};
use crate::ingest::{encode_table, read_table, EncodingReport};
use crate::zoo::lookup;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub model_id: String,
    pub seed: u64,
    pub hyperparameters: Value,
    pub encoding: EncodingReport,
    pub state: ModelSnapshot,
}

/// Fits zoo model `model_id` on a CSV. Column kinds are inferred.
pub fn train_model(model_id: &str, csv: &Path, target: &str, seed: SeedSpec) -> Result<ModelArtifact> {
    let entry = lookup(model_id)?;
    let table = read_table(csv)?;
    let data = encode_table(model_id, &table, target, &BTreeMap::new())?;
    let seed = seed.resolve();
    let mut model = entry.build();
    model.reseed(seed);
    model.fit(&data.x, &data.y).map_err(|source| BenchError::Model {
        model: model_id.to_owned(),
        dataset: csv.display().to_string(),
        fold: None,
        source,
    })?;
    Ok(ModelArtifact {
        format_version: FORMAT_VERSION,
        model_id: model_id.to_owned(),
        seed,
        hyperparameters: model.hyperparameters(),
        encoding: data.report,
        state: model.snapshot()?,
    })
}

impl ModelArtifact {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string(self).expect("artifact serializes");
        text.push('\n');
        text
    }

    /// Parses an artifact, checking the format version before anything else.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| BenchError::Artifact(e.to_string()))?;
        let found = value
            .get("format_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| BenchError::Artifact("missing format_version".into()))?;
        if found != u64::from(FORMAT_VERSION) {
            return Err(BenchError::VersionMismatch {
                expected: FORMAT_VERSION,
                found: u32::try_from(found).unwrap_or(u32::MAX),
            });
        }
        let artifact: Self = serde_json::from_value(value).map_err(|e| BenchError::Artifact(e.to_string()))?;
        if artifact.state.kind() != artifact.model_id {
            return Err(BenchError::Artifact(format!(
                "model id `{}` does not match stored state `{}`",
                artifact.model_id,
                artifact.state.kind()
            )));
        }
        Ok(artifact)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(io_error(path))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        Self::from_json(&text)
    }

    /// One predicted label per row of `csv`, using the stored encoding.
    pub fn predict_csv(&self, csv: &Path) -> Result<Vec<String>> {
        let table = read_table(csv)?;
        let x = self.encoding.transform(&table)?;
        let model = self.state.clone().restore()?;
        let pred = model.predict(&x)?;
        let classes = ClassSet::new(self.encoding.classes.iter().cloned())?;
        Ok(classes.decode(&pred)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn csv(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    const TRAIN: &str = "a,b,label\n1,x,no\n2,y,yes\n3,x,no\n4,y,yes\n5,x,maybe\n6,,no\n";

    #[test]
    fn unbounded_tree_memorizes_its_training_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = csv(dir.path(), "t.csv", TRAIN);
        let art = train_model("decision_tree", &path, "label", SeedSpec::fixed(1)).unwrap();
        assert_eq!(art.predict_csv(&path).unwrap(), ["no", "yes", "no", "yes", "maybe", "no"]);
    }

    #[test]
    fn round_trip_keeps_predictions() {
        let dir = tempfile::tempdir().unwrap();
        let path = csv(dir.path(), "t.csv", TRAIN);
        for id in ["random_forest", "logistic_regression", "directional_forest"] {
            let art = train_model(id, &path, "label", SeedSpec::fixed(3)).unwrap();
            let file = dir.path().join("m.json");
            art.save(&file).unwrap();
            let back = ModelArtifact::load(&file).unwrap();
            assert_eq!(back.predict_csv(&path).unwrap(), art.predict_csv(&path).unwrap(), "{id}");
            assert_eq!(back.to_json(), art.to_json());
        }
    }

    #[test]
    fn other_versions_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = csv(dir.path(), "t.csv", TRAIN);
        let art = train_model("decision_tree", &path, "label", SeedSpec::fixed(1)).unwrap();
        let mut value: Value = serde_json::from_str(&art.to_json()).unwrap();
        value["format_version"] = Value::from(FORMAT_VERSION + 1);
        assert!(matches!(
            ModelArtifact::from_json(&value.to_string()),
            Err(BenchError::VersionMismatch { found, .. }) if found == FORMAT_VERSION + 1
        ));
    }

    #[test]
    fn missing_column_at_predict_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = csv(dir.path(), "t.csv", TRAIN);
        let art = train_model("decision_tree", &path, "label", SeedSpec::fixed(1)).unwrap();
        let new = csv(dir.path(), "n.csv", "a\n1\n");
        assert!(matches!(art.predict_csv(&new), Err(BenchError::SchemaMismatch(m)) if m.contains("`b`")));
    }

    #[test]
    fn unknown_model_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = csv(dir.path(), "t.csv", TRAIN);
        assert!(matches!(
            train_model("svm", &path, "label", SeedSpec::fixed(1)),
            Err(BenchError::UnknownModel(_))
        ));
    }
}
