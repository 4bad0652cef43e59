//! CSV tables, the JSON report and the output-directory guard.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

pub const REPORT_FILE: &str = "report.json";

/// Shortest round-trip rendering, switching to exponent form for extreme
/// magnitudes.
pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 {
        "0".into()
    } else {
        format!("{x:?}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, fmt_f)
}

/// A CSV table. Cells never contain commas, quotes or newlines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub build: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub task: String,
    pub provenance: Provenance,
    pub config: serde_json::Value,
    /// Scalar results keyed by name.
    pub metrics: BTreeMap<String, f64>,
    /// Conditions worth a reader's attention, such as skipped analyses.
    pub flags: Vec<String>,
    pub tables: Vec<String>,
    pub plots: Vec<String>,
}

impl Report {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            task: cfg.task_name().into(),
            provenance: Provenance {
                config_hash: cfg.hash(),
                seed: cfg.seed(),
                build: build_id(),
            },
            config: serde_json::to_value(cfg).expect("config serializes"),
            metrics: BTreeMap::new(),
            flags: Vec::new(),
            tables: Vec::new(),
            plots: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }
}

pub fn build_id() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

/// Everything a command writes: named tables, SVG plots, the report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Artifacts {
    pub tables: Vec<(String, Table)>,
    pub plots: Vec<(String, String)>,
    pub documents: Vec<(String, serde_json::Value)>,
}

impl Artifacts {
    pub fn table(&mut self, name: &str, t: Table) {
        self.tables.push((name.to_string(), t));
    }

    pub fn get(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

/// Refuses to reuse a directory whose report came from another config.
pub fn guard_output_dir(dir: &Path, hash: &str, force: bool) -> Result<()> {
    let report = dir.join(REPORT_FILE);
    if force || !report.exists() {
        return Ok(());
    }
    let text = fs::read_to_string(&report).map_err(|e| CliError::io(&report, e))?;
    let found = serde_json::from_str::<serde_json::Value>(&text)
        .ok()
        .and_then(|v| v["provenance"]["config_hash"].as_str().map(String::from))
        .unwrap_or_else(|| "unreadable".into());
    if found == hash {
        Ok(())
    } else {
        Err(CliError::ReportConflict {
            dir: dir.to_path_buf(),
            found,
        })
    }
}

fn write(path: PathBuf, contents: &[u8]) -> Result<()> {
    fs::write(&path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes artifacts, then the report listing them.
pub fn emit(dir: &Path, report: Option<&mut Report>, artifacts: &Artifacts, plots: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let mut table_names = Vec::new();
    let mut plot_names = Vec::new();
    for (name, t) in &artifacts.tables {
        let file = format!("{name}.csv");
        write(dir.join(&file), t.to_csv().as_bytes())?;
        written.push(dir.join(&file));
        table_names.push(file);
    }
    for (name, doc) in &artifacts.documents {
        let file = format!("{name}.json");
        let text = serde_json::to_string_pretty(doc).expect("document serializes");
        write(dir.join(&file), text.as_bytes())?;
        written.push(dir.join(&file));
        table_names.push(file);
    }
    if plots {
        for (name, svg) in &artifacts.plots {
            let file = format!("{name}.svg");
            write(dir.join(&file), svg.as_bytes())?;
            written.push(dir.join(&file));
            plot_names.push(file);
        }
    }
    if let Some(report) = report {
        report.tables = table_names;
        report.plots = plot_names;
        let text = serde_json::to_string_pretty(report).expect("report serializes");
        write(dir.join(REPORT_FILE), text.as_bytes())?;
        written.push(dir.join(REPORT_FILE));
    }
    Ok(written)
}
