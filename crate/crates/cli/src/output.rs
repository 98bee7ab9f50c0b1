//! Columnar output, atomic writes and the per-run manifest.
//!
//! Floats go to CSV as `{:.16e}` (17 significant digits) and to JSON as
//! the shortest string that round-trips. Neither depends on locale.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dicke_dyn::ModelParams;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Rows under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn encode(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
                w.write_record(&self.columns).map_err(|e| CliError::Failure(e.to_string()))?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv_field)).map_err(|e| CliError::Failure(e.to_string()))?;
                }
                w.into_inner().map_err(|e| CliError::Failure(e.to_string()))
            }
            // {"columns": [...], "rows": [[...], ...]} keeps the column order
            Format::Json => {
                let rows: Vec<Value> =
                    self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
                let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
                json_bytes(&doc)
            }
        }
    }
}

/// A table read back from disk. Numeric-looking fields become `Num`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ReadTable {
    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = fs::read(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let bad = |e: String| CliError::Validation(format!("{}: {e}", path.display()));
        if path.extension().is_some_and(|e| e == "json") {
            let doc: Value = serde_json::from_slice(&bytes).map_err(|e| bad(e.to_string()))?;
            let columns: Vec<String> =
                serde_json::from_value(doc["columns"].clone()).map_err(|e| bad(format!("columns: {e}")))?;
            let raw: Vec<Vec<Value>> =
                serde_json::from_value(doc["rows"].clone()).map_err(|e| bad(format!("rows: {e}")))?;
            let rows = raw
                .into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|v| match v {
                            Value::Number(n) => n.as_f64().map_or(Cell::Empty, Cell::Num),
                            Value::String(s) => Cell::Text(s),
                            _ => Cell::Empty,
                        })
                        .collect()
                })
                .collect();
            return Ok(Self { columns, rows });
        }
        let mut reader = csv::Reader::from_reader(bytes.as_slice());
        let columns = reader.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            rows.push(
                record
                    .iter()
                    .map(|f| {
                        if f.is_empty() {
                            Cell::Empty
                        } else {
                            f.parse::<f64>().map_or_else(|_| Cell::Text(f.to_string()), Cell::Num)
                        }
                    })
                    .collect(),
            );
        }
        Ok(Self { columns, rows })
    }

    pub fn index(&self, name: &str) -> CliResult<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::Validation(format!("missing column {name}")))
    }

    pub fn num(&self, row: usize, col: usize) -> Option<f64> {
        match self.rows[row].get(col)? {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn text(&self, row: usize, col: usize) -> Option<&str> {
        match self.rows[row].get(col)? {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Failure(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let cannot = |e: std::io::Error| CliError::Config(format!("cannot write {}: {e}", path.display()));
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(cannot)?;
    tmp.write_all(bytes).map_err(cannot)?;
    tmp.as_file().sync_all().map_err(cannot)?;
    tmp.persist(path).map_err(|e| cannot(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileKind {
    FixedPoints,
    BoundLuminosity,
    Trajectory,
    ReducedTrajectory,
    PoincareCell,
    PoincareSummary,
    Potential,
    Lyapunov,
    LyapunovTrace,
}

/// One emitted file and what `validate` needs to check it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub kind: FileKind,
    pub model: ModelParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    /// Relative tolerance for the conservation checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Per-trajectory `|H − E|` recorded while the file was produced.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drifts: Vec<f64>,
}

impl FileEntry {
    pub fn new(path: String, kind: FileKind, model: ModelParams) -> Self {
        Self { path, kind, model, energy: None, tolerance: None, drifts: Vec::new() }
    }
}

/// `<command>.manifest.json`: what ran and which files it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub model: ModelParams,
    pub settings: Value,
    pub files: Vec<FileEntry>,
}

pub fn manifest_name(command: &str) -> String {
    format!("{command}.manifest.json")
}

/// Output directory of a run.
#[derive(Debug, Clone)]
pub struct OutDir {
    pub root: PathBuf,
}

impl OutDir {
    pub fn create(root: PathBuf) -> CliResult<Self> {
        fs::create_dir_all(&root).map_err(|e| CliError::Config(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self { root })
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        write_atomic(&self.root.join(name), bytes)
    }

    pub fn table(&self, stem: &str, table: &Table, format: Format) -> CliResult<String> {
        let name = format!("{stem}.{}", format.extension());
        self.write(&name, &table.encode(format)?)?;
        Ok(name)
    }

    pub fn manifest(&self, manifest: &Manifest) -> CliResult<()> {
        self.write(&manifest_name(&manifest.command), &json_bytes(manifest)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["a", "b", "label"]);
        t.push(vec![0.1.into(), Cell::Empty, "x,y".into()]);
        t.push(vec![(-1e-300).into(), 7usize.into(), "plain".into()]);
        t.push(vec![f64::MIN_POSITIVE.into(), 0.3.into(), Cell::Empty]);
        t
    }

    #[test]
    fn floats_round_trip_through_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutDir::create(dir.path().to_path_buf()).unwrap();
        for format in [Format::Csv, Format::Json] {
            let name = out.table("t", &sample(), format).unwrap();
            let back = ReadTable::read(&dir.path().join(name)).unwrap();
            assert_eq!(back.columns, ["a", "b", "label"]);
            assert_eq!(back.num(0, 0), Some(0.1));
            assert_eq!(back.num(1, 0), Some(-1e-300));
            assert_eq!(back.num(2, 0), Some(f64::MIN_POSITIVE));
            assert_eq!(back.num(1, 1), Some(7.0));
            assert_eq!(back.num(0, 1), None);
            assert_eq!(back.text(0, 2), Some("x,y"));
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "NaN");
    }

    #[test]
    fn csv_quotes_and_crlf() {
        let text = String::from_utf8(sample().encode(Format::Csv).unwrap()).unwrap();
        assert!(text.starts_with("a,b,label\r\n"));
        assert!(text.contains("\"x,y\""));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
