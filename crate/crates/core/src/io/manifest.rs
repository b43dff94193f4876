//! JSON-Lines manifests: one face set per line.
//!
//! ```text
//! {"set_id":"a","label":"alice","faces":[{"vec":[0.1,0.2],"score":0.97}]}
//! ```
//!
//! The dimension is taken from the first record and enforced for the rest.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::{Embedding, FaceMember, FaceSet};
use crate::error::{Error, Result};
use crate::io::write_atomic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceRecord {
    pub vec: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub set_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub faces: Vec<FaceRecord>,
}

impl From<&FaceSet> for ManifestRecord {
    fn from(s: &FaceSet) -> Self {
        Self {
            set_id: s.set_id().to_string(),
            label: s.label().map(str::to_string),
            faces: s
                .members()
                .iter()
                .map(|m| FaceRecord {
                    vec: m.embedding.as_slice().to_vec(),
                    score: m.score,
                })
                .collect(),
        }
    }
}

fn record_to_set(record: ManifestRecord) -> std::result::Result<FaceSet, String> {
    if record.set_id.is_empty() {
        return Err("empty set_id".into());
    }
    if record.faces.is_empty() {
        return Err(format!("set `{}` has no faces", record.set_id));
    }
    let mut members = Vec::with_capacity(record.faces.len());
    for (i, face) in record.faces.into_iter().enumerate() {
        if let Some(s) = face.score {
            if !(s > 0.0 && s <= 1.0) {
                return Err(format!("face {i}: score {s} outside (0, 1]"));
            }
        }
        let emb = Embedding::new(face.vec).map_err(|e| format!("face {i}: {e}"))?;
        members.push(FaceMember::new(emb, face.score));
    }
    FaceSet::new(record.set_id, record.label, members).map_err(|e| e.to_string())
}

/// Parses a manifest from any reader. `origin` only labels error messages.
pub fn parse_manifest(reader: impl BufRead, origin: &Path) -> Result<Vec<FaceSet>> {
    let mut sets: Vec<FaceSet> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            line: line_no,
            message,
        };
        let record: ManifestRecord = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        let set = record_to_set(record).map_err(parse_err)?;
        if let Some(first) = sets.first() {
            if first.dim() != set.dim() {
                return Err(Error::SetDimensionMismatch {
                    left: first.set_id().to_string(),
                    left_dim: first.dim(),
                    right: set.set_id().to_string(),
                    right_dim: set.dim(),
                });
            }
        }
        if !seen.insert(set.set_id().to_string()) {
            return Err(Error::DuplicateSetId(set.set_id().to_string()));
        }
        sets.push(set);
    }
    Ok(sets)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<FaceSet>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(BufReader::new(file), path)
}

pub fn render_manifest(sets: &[FaceSet]) -> String {
    let mut out = String::new();
    for s in sets {
        out.push_str(&serde_json::to_string(&ManifestRecord::from(s)).expect("records always serialize"));
        out.push('\n');
    }
    out
}

pub fn write_manifest(sets: &[FaceSet], path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), render_manifest(sets).as_bytes())
}
