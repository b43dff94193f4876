//! Pair lists (`left,right` CSV with header) and id lists (one set id per
//! line, `#` comments allowed).

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::write_atomic;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Reads a CSV of set-id pairs. The header must start with `left,right`;
/// extra columns are ignored.
pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = read(path)?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if headers.get(0) != Some("left") || headers.get(1) != Some("right") {
        return Err(parse_err(1, "expected header `left,right`".into()));
    }
    let mut pairs = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        match (record.get(0), record.get(1)) {
            (Some(l), Some(r)) if !l.is_empty() && !r.is_empty() => pairs.push((l.to_string(), r.to_string())),
            _ => return Err(parse_err(line, "expected two set ids".into())),
        }
    }
    Ok(pairs)
}

pub fn render_pairs(pairs: &[(String, String)]) -> String {
    let mut out = String::from("left,right\n");
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for (l, r) in pairs {
        w.write_record([l, r]).expect("in-memory write");
    }
    out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory flush")).expect("utf-8 input"));
    out
}

pub fn write_pairs(pairs: &[(String, String)], path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), render_pairs(pairs).as_bytes())
}

pub fn load_id_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    Ok(read(path.as_ref())?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

pub fn render_id_list<S: AsRef<str>>(ids: &[S]) -> String {
    ids.iter().map(|s| format!("{}\n", s.as_ref())).collect()
}

pub fn write_id_list<S: AsRef<str>>(ids: &[S], path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), render_id_list(ids).as_bytes())
}
