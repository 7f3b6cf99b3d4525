//! Tables, their CSV/JSON rendering, and run manifests.

use std::path::{Path, PathBuf};

use conic_core::measure_io::format_sig;
use conic_core::{CheckReport, ConeSpec};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_sig(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Empty => String::new(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format_sig(*v),
            Cell::Num(_) | Cell::Empty => "null".into(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => serde_json::to_string(s).expect("strings serialize"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let objs: Vec<String> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let fields: Vec<String> = self
                            .columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| {
                                format!(
                                    "{}:{}",
                                    serde_json::to_string(c).expect("strings serialize"),
                                    v.json()
                                )
                            })
                            .collect();
                        format!("  {{{}}}", fields.join(","))
                    })
                    .collect();
                if objs.is_empty() {
                    "[]\n".into()
                } else {
                    format!("[\n{}\n]\n", objs.join(",\n"))
                }
            }
        }
    }
}

/// Check summary recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub pass: bool,
    pub skipped: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub details: String,
}

impl From<&CheckReport> for CheckSummary {
    fn from(r: &CheckReport) -> Self {
        CheckSummary {
            name: r.name.clone(),
            pass: r.pass,
            skipped: r.skipped,
            lhs: r.lhs,
            rhs: r.rhs,
            details: r.details.clone(),
        }
    }
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: ExperimentConfig,
    /// Resolved cone specs, in `--cone` order.
    pub cone_specs: Vec<ConeSpec>,
    pub cone_hashes: Vec<String>,
    pub output: Option<PathBuf>,
    pub checks: Vec<CheckSummary>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_manifest(m: &Manifest, out: &Path) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(m).map_err(|e| CliError::Internal(e.to_string()))?;
    write_file(&manifest_path(out), &(json + "\n"))
}

pub fn read_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
