use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus rows, rendered as CSV or as a JSON array of objects.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub enum Cell {
    Text(String),
    Int(u64),
    Float(f64),
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Text(t) => t.clone(),
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(x) => float(*x),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| {
                        let v = match c {
                            Cell::Text(t) => Value::from(t.as_str()),
                            Cell::Int(i) => Value::from(*i),
                            Cell::Float(x) => Value::from(*x),
                        };
                        (k.to_string(), v)
                    })
                    .collect::<serde_json::Map<_, _>>();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn json_text<T: Serialize>(value: &T) -> Result<String, CliError> {
    // Round-tripping through `Value` sorts object keys.
    let v = serde_json::to_value(value).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

/// `<out>` with `suffix` appended to the full file name.
pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new<P: Serialize>(command: &str, params: &P) -> Result<Self, CliError> {
        Ok(Self {
            command: command.to_string(),
            params: serde_json::to_value(params).map_err(|e| CliError::Internal(e.to_string()))?,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        })
    }

    pub fn write_beside(&self, out: &Path) -> Result<(), CliError> {
        let path = sidecar(out, ".manifest.json");
        write_text(Some(&path), &json_text(self)?)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("malformed manifest {}: {e}", path.display())))
    }
}
