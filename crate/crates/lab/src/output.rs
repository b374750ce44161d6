//! Result records, CSV tables and the JSON run manifest.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// Version string written to every manifest.
pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits
            Cell::Real(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Real(v) if v.is_nan() => "nan".into(),
            Cell::Real(v) => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Cell::Real(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// One CSV file: a header row and one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Empty for the main table, otherwise the file-name suffix.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Values of a column, `None` where the cell is not numeric.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_real()).collect())
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Outcome of a built-in check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub version: &'static str,
    pub timestamp: String,
    pub wall_time: f64,
    pub tables: Vec<Table>,
    pub summary: Vec<(String, f64)>,
    pub checks: Vec<Check>,
}

impl ResultRecord {
    pub fn main_table(&self) -> &Table {
        &self.tables[0]
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn manifest(&self, files: &[PathBuf]) -> Json {
        let config: serde_json::Map<String, Json> = self
            .config
            .entries()
            .map(|(k, v)| (k.name().to_string(), Json::String(v.to_string())))
            .collect();
        json!({
            "experiment": self.experiment,
            "config": config,
            "config_normalized": self.config.to_normalized(),
            "config_hash": self.config_hash,
            "version": self.version,
            "core_version": gdnls_core_version(),
            "timestamp": self.timestamp,
            "wall_time_seconds": self.wall_time,
            "outputs": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "summary": self.summary.iter().map(|(k, v)| json!({"name": k, "value": finite_or_string(*v)})).collect::<Vec<_>>(),
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
            "status": if self.all_checks_passed() { "pass" } else { "fail" },
        })
    }

    /// Write `<stem>.csv`, `<stem>_<table>.csv` for the extra tables and
    /// `<stem>.manifest.json`; returns the paths in that order.
    pub fn write(&self, stem: &Path) -> io::Result<Vec<PathBuf>> {
        if let Some(dir) = stem.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let base = stem.to_string_lossy().into_owned();
        let mut files = Vec::new();
        for t in &self.tables {
            let path = if t.name.is_empty() {
                PathBuf::from(format!("{base}.csv"))
            } else {
                PathBuf::from(format!("{base}_{}.csv", t.name))
            };
            fs::write(&path, t.to_csv())?;
            files.push(path);
        }
        let manifest = PathBuf::from(format!("{base}.manifest.json"));
        let text = serde_json::to_string_pretty(&self.manifest(&files)).expect("json");
        fs::write(&manifest, text + "\n")?;
        files.push(manifest);
        Ok(files)
    }
}

fn finite_or_string(v: f64) -> Json {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn gdnls_core_version() -> &'static str {
    // the workspace versions the two crates together
    env!("CARGO_PKG_VERSION")
}

/// SHA-256 of the normalized config text, hex encoded.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(cfg.to_normalized().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_seventeen_digits() {
        assert_eq!(Cell::Real(0.1).render(), "1.0000000000000001e-1");
        assert_eq!(Cell::Real(-2.0).render(), "-2.0000000000000000e0");
        let v = 1.0 / 3.0;
        assert_eq!(Cell::Real(v).render().parse::<f64>().unwrap(), v);
        assert_eq!(Cell::Real(f64::INFINITY).render(), "inf");
        assert_eq!(Cell::Empty.render(), "");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("", &["x", "label"]);
        t.push(vec![1.5.into(), "a,b".into()]);
        let text = String::from_utf8(t.to_csv()).unwrap();
        assert_eq!(text, "x,label\r\n1.5000000000000000e0,\"a,b\"\r\n");
        assert_eq!(t.column("x").unwrap(), vec![Some(1.5)]);
        assert!(t.column("y").is_none());
    }
}
