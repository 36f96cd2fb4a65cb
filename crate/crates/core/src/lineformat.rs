//! The shared line-oriented artifact format: a `#INDEX <kind> v1` header
//! followed by one JSON object per line. Canonical ordering and the absence
//! of timestamps make files byte-stable across runs.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::index::IndexError;

pub const FORMAT_VERSION: &str = "v1";

pub fn render<T: Serialize>(kind: &str, items: &[T]) -> Result<String, IndexError> {
    let mut out = format!("#INDEX {kind} {FORMAT_VERSION}\n");
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| IndexError::IoFailure {
            path: kind.to_string(),
            reason: e.to_string(),
        })?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_file<T: Serialize>(path: &Path, kind: &str, items: &[T]) -> Result<(), IndexError> {
    let text = render(kind, items)?;
    let mut file = fs::File::create(path).map_err(|e| IndexError::io(path, e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| IndexError::io(path, e))
}

pub fn parse<T: DeserializeOwned>(text: &str, kind: &str, path: &Path) -> Result<Vec<T>, IndexError> {
    let mut lines = text.lines();
    let expected = format!("#INDEX {kind} {FORMAT_VERSION}");
    let header = lines.next().unwrap_or_default();
    if header != expected {
        return Err(IndexError::FormatVersionMismatch {
            path: path.display().to_string(),
            found: header.to_string(),
            expected,
        });
    }
    let mut items = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(line).map_err(|e| IndexError::IoFailure {
            path: path.display().to_string(),
            reason: format!("bad record: {e}"),
        })?;
        items.push(item);
    }
    Ok(items)
}

/// Reads a header+JSON-lines file. A missing or empty file reports a format
/// mismatch (the directory is not an artifact store), not an IO failure.
pub fn read_file<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<Vec<T>, IndexError> {
    match fs::read_to_string(path) {
        Ok(text) => parse(&text, kind, path),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(IndexError::FormatVersionMismatch {
                path: path.display().to_string(),
                found: "missing file".to_string(),
                expected: format!("#INDEX {kind} {FORMAT_VERSION}"),
            })
        }
        Err(e) => Err(IndexError::io(path, e)),
    }
}
