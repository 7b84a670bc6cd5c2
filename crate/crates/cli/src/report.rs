//! Result tables and the `<experiment>.csv` / `<experiment>.json` pair.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
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
            // shortest round-trip form, exponent notation at the extremes
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Vec<&Cell> {
        let i = self.header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| &r[i]).collect()
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        self.column(name).into_iter().filter_map(Cell::as_f64).collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

/// What an experiment hands back to the runner.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub summary: Map<String, Value>,
    /// Flagged conditions that do not invalidate the results.
    pub warnings: Vec<String>,
    /// Set when a computed quantity is unusable; the run exits with status 3.
    pub failure: Option<String>,
}

impl Outcome {
    pub fn new(table: Table) -> Self {
        Self { table, summary: Map::new(), warnings: Vec::new(), failure: None }
    }

    pub fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }

    pub fn fail(&mut self, why: String) {
        if self.failure.is_none() {
            self.failure = Some(why);
        }
    }

    /// Marks the outcome failed if any number in the table or summary is not finite.
    pub fn check_finite(&mut self) {
        let bad_cell = self.table.rows.iter().flatten().any(|c| matches!(c, Cell::Float(v) if !v.is_finite()));
        let bad_summary = self.summary.values().any(has_nonfinite);
        if bad_cell || bad_summary {
            self.fail("non-finite value in results".into());
        }
    }
}

// serde_json stores NaN and infinities as null
fn has_nonfinite(v: &Value) -> bool {
    match v {
        Value::Null => true,
        Value::Array(a) => a.iter().any(has_nonfinite),
        Value::Object(o) => o.values().any(has_nonfinite),
        _ => false,
    }
}

pub struct RunInfo<'a> {
    pub experiment: &'a str,
    pub seed: u64,
    pub config: &'a Map<String, Value>,
    pub wall_time_s: f64,
}

pub fn report_json(info: &RunInfo, out: &Outcome) -> Value {
    json!({
        "experiment": info.experiment,
        "status": if out.failure.is_some() { "numerical-failure" } else { "ok" },
        "seed": info.seed,
        "config": info.config,
        "versions": {
            "lp-tile-lab": env!("CARGO_PKG_VERSION"),
            "lp-tile-core": lp_tile_core::VERSION,
        },
        "wall_time_s": info.wall_time_s,
        "csv": format!("{}.csv", info.experiment),
        "columns": out.table.header,
        "rows": out.table.rows.len(),
        "summary": out.summary,
        "warnings": out.warnings,
        "failure": out.failure,
    })
}

/// Writes both files; returns their paths.
pub fn emit(dir: &Path, info: &RunInfo, out: &Outcome) -> Result<(PathBuf, PathBuf), CliError> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", info.experiment));
    let json_path = dir.join(format!("{}.json", info.experiment));
    std::fs::write(&csv_path, out.table.to_csv()?)?;
    let mut text = serde_json::to_string_pretty(&report_json(info, out))?;
    text.push('\n');
    std::fs::write(&json_path, text)?;
    Ok((csv_path, json_path))
}

/// The JSON schema reports conform to.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(t.to_csv().unwrap(), b"a,b\n");
    }

    #[test]
    fn nonfinite_values_fail_the_outcome() {
        let mut t = Table::new(&["x"]);
        t.push(vec![Cell::Float(1.5)]);
        let mut o = Outcome::new(t.clone());
        o.put("slope", 0.25);
        o.check_finite();
        assert!(o.failure.is_none());
        o.put("bad", f64::NAN);
        o.check_finite();
        assert!(o.failure.is_some());
        t.push(vec![Cell::Float(f64::INFINITY)]);
        let mut o = Outcome::new(t);
        o.check_finite();
        assert!(o.failure.is_some());
    }
}
