//! Result tables, CSV emission and the per-run JSON manifest.
//!
//! CSV uses RFC-4180 quoting, '.' decimal separators and 17 significant
//! digits for floats, so re-running an experiment with the same spec
//! produces byte-identical data files.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    UInt(u64),
    Float(f64),
    Str(String),
    Bool(bool),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::UInt(v) => v.to_string(),
            Value::Float(v) => format_float(*v),
            Value::Str(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::UInt(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::UInt(v as u64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

/// 17 significant digits, '.' decimal, stable across runs.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len(), "table {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(
            &self
                .columns
                .iter()
                .map(|c| csv_quote(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            let line = row
                .iter()
                .map(|v| csv_quote(&v.render()))
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(out, "{line}");
        }
        out
    }

    fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (col, val) in self.columns.iter().zip(row) {
                    let jv = match val {
                        Value::Int(v) => serde_json::json!(v),
                        Value::UInt(v) => serde_json::json!(v),
                        Value::Float(v) => serde_json::json!(format_float(*v)),
                        Value::Str(s) => serde_json::json!(s),
                        Value::Bool(b) => serde_json::json!(b),
                    };
                    obj.insert(col.clone(), jv);
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({ "name": self.name, "columns": self.columns, "rows": rows })
    }
}

/// One assertion attached to an experiment. `claim` states the checked
/// property in symbols so a failure message is self-contained.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub claim: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, claim: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            claim: claim.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExpOutput {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl ExpOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Write `<table>.csv` files (or `.json` with the json format) plus
    /// `manifest.json` into the directory. Returns the written file paths.
    pub fn write(
        &self,
        dir: &Path,
        format: OutputFormat,
        version: &str,
        wall_seconds: f64,
    ) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut table_entries = Vec::new();
        for table in &self.tables {
            let (file, body) = match format {
                OutputFormat::Csv => (format!("{}.csv", table.name), table.to_csv()),
                OutputFormat::Json => (
                    format!("{}.json", table.name),
                    serde_json::to_string_pretty(&table.to_json()).expect("serializable") + "\n",
                ),
            };
            let path = dir.join(&file);
            fs::write(&path, body)?;
            table_entries.push(serde_json::json!({
                "name": table.name,
                "file": file,
                "rows": table.rows.len(),
            }));
            written.push(path);
        }
        let manifest = serde_json::json!({
            "id": self.id,
            "params": self.params,
            "seed": self.seed,
            "version": version,
            "wall_time_seconds": wall_seconds,
            "tables": table_entries,
            "checks": self.checks,
            "passed": self.passed(),
        });
        let path = dir.join("manifest.json");
        fs::write(
            &path,
            serde_json::to_string_pretty(&manifest).expect("serializable") + "\n",
        )?;
        written.push(path);
        Ok(written)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}', expected csv or json")),
        }
    }
}
