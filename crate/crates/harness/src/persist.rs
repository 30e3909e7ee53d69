//! Field dumps (`.bin` of little-endian `f64` plus a `.json` header) and JSON reports.
//! Every write goes to a temporary sibling first and is renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use dirty_bosons::{Field, Grid};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const FIELD_FORMAT: &str = "dirty-bosons-field";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format: String,
    pub version: u32,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub periodic: Vec<bool>,
    pub count: usize,
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| HarnessError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

fn paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("bin"), base.with_extension("json"))
}

/// Saves a field as `<base>.bin` and `<base>.json`; returns both paths.
pub fn save_field(field: &Field, base: &Path) -> Result<(PathBuf, PathBuf)> {
    let (bin, json) = paths(base);
    let header = FieldHeader {
        format: FIELD_FORMAT.into(),
        version: FORMAT_VERSION,
        shape: field.grid.shape.clone(),
        spacing: field.grid.spacing.clone(),
        periodic: field.grid.periodic.clone(),
        count: field.values.len(),
    };
    let bytes: Vec<u8> = field.values.iter().flat_map(|v| v.to_le_bytes()).collect();
    write_atomic(&bin, &bytes)?;
    write_atomic(&json, serde_json::to_string_pretty(&header)?.as_bytes())?;
    Ok((bin, json))
}

pub fn load_field(base: &Path) -> Result<Field> {
    let (bin, json) = paths(base);
    let text = fs::read_to_string(&json).map_err(|e| HarnessError::io(&json, e))?;
    let header: FieldHeader = serde_json::from_str(&text)
        .map_err(|e| HarnessError::CorruptHeader(format!("{}: {e}", json.display())))?;
    if header.format != FIELD_FORMAT {
        return Err(HarnessError::CorruptHeader(format!("{}: unknown format `{}`", json.display(), header.format)));
    }
    if header.version != FORMAT_VERSION {
        return Err(HarnessError::VersionMismatch { found: header.version, expected: FORMAT_VERSION });
    }
    let grid = Grid::with_boundaries(header.shape.clone(), header.spacing.clone(), header.periodic.clone())
        .map_err(|e| HarnessError::CorruptHeader(format!("{}: {e}", json.display())))?;
    if grid.len() != header.count {
        return Err(HarnessError::CorruptHeader(format!("{}: count does not match shape", json.display())));
    }
    let bytes = fs::read(&bin).map_err(|e| HarnessError::io(&bin, e))?;
    if bytes.len() != 8 * header.count {
        return Err(HarnessError::CorruptHeader(format!(
            "{}: {} bytes, header promises {}",
            bin.display(),
            bytes.len(),
            8 * header.count
        )));
    }
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    Ok(Field { grid, values })
}

/// Versioned JSON envelope. `serde_json` prints the shortest decimal that parses back
/// to the same `f64`, so every value survives the round trip bit for bit.
#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    version: u32,
    body: T,
}

pub fn save_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&Envelope { version: FORMAT_VERSION, body: report })?;
    write_atomic(path, text.as_bytes())
}

pub fn load_report<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| HarnessError::CorruptHeader(format!("{}: {e}", path.display())))?;
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| HarnessError::CorruptHeader(format!("{}: missing version", path.display())))?;
    if version != FORMAT_VERSION as u64 {
        return Err(HarnessError::VersionMismatch { found: version as u32, expected: FORMAT_VERSION });
    }
    let body = value
        .get("body")
        .cloned()
        .ok_or_else(|| HarnessError::CorruptHeader(format!("{}: missing body", path.display())))?;
    serde_json::from_value(body).map_err(|e| HarnessError::CorruptHeader(format!("{}: {e}", path.display())))
}

/// A CSV table of already formatted cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip representation; empty for a missing value.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}
