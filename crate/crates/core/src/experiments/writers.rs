//! Artifact persistence: tables as CSV or JSON, reports always JSON.
//!
//! Everything written here must be a pure function of the run configuration,
//! so cell rendering avoids locale, time, and pointer-dependent state, and
//! files are listed in creation order for the manifest.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config {
                path: "output.format".into(),
                message: format!("unknown format '{other}', expected csv or json"),
            }),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// One table cell. Floats keep their shortest round-trip form in both CSV
/// and JSON, so reruns are byte-identical.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Shortest round-trip decimal for mid-range magnitudes, exponent form for
/// the extremes (1e-31 beats a 30-zero decimal string in a diff).
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-4 && v.abs() < 1e15 {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Serialize)]
struct JsonTable<'a> {
    columns: &'a [&'a str],
    rows: &'a [Vec<Cell>],
}

/// Output directory plus the ordered list of files written into it.
#[derive(Debug)]
pub struct ArtifactSet {
    dir: PathBuf,
    format: OutputFormat,
    files: Vec<PathBuf>,
}

impl ArtifactSet {
    pub fn create(dir: &Path, format: OutputFormat) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), format, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn format(&self) -> OutputFormat {
        self.format
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    /// Tabular artifact named `stem.csv` or `stem.json` per the run format.
    pub fn write_table(&mut self, stem: &str, columns: &[&str], rows: &[Vec<Cell>]) -> Result<PathBuf> {
        if let Some(bad) = rows.iter().find(|r| r.len() != columns.len()) {
            return Err(Error::Shape(format!(
                "table '{stem}': row of {} cells under {} columns",
                bad.len(),
                columns.len()
            )));
        }
        let name = format!("{stem}.{}", self.format.extension());
        let bytes = match self.format {
            OutputFormat::Csv => {
                let mut text = columns.join(",");
                text.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(Cell::render).collect();
                    text.push_str(&cells.join(","));
                    text.push('\n');
                }
                text.into_bytes()
            }
            OutputFormat::Json => {
                let mut bytes = serde_json::to_vec_pretty(&JsonTable { columns, rows })
                    .map_err(|e| Error::Domain(format!("table '{stem}': {e}")))?;
                bytes.push(b'\n');
                bytes
            }
        };
        self.write_raw(&name, &bytes)
    }

    /// Structured report; always JSON regardless of the table format.
    pub fn write_report<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| Error::Domain(format!("report '{name}': {e}")))?;
        bytes.push(b'\n');
        self.write_raw(name, &bytes)
    }

    fn write_raw(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.files.push(path.clone());
        Ok(path)
    }
}
