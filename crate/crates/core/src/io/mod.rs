//! File formats: manifests, pair lists and report serialization.

mod manifest;
mod pairs;
mod report;

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub use manifest::{load_manifest, parse_manifest, render_manifest, write_manifest, FaceRecord, ManifestRecord};
pub use pairs::{load_id_list, load_pairs, render_id_list, render_pairs, write_id_list, write_pairs};
pub use report::{
    render_report, round_sig, write_report, Decisions, Format, Identification, Identifications, RankedLists, Report,
};

/// Writes `bytes` to a temporary file beside `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
