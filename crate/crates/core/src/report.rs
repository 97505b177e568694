//! Experiment artifacts: a CSV table, a line plot and a JSON summary of
//! pass/fail checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::curve::fmt_num;
use crate::error::{Error, Result};
use crate::plot::{emit_plot, PlotLabels, Series};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A rectangular table with a header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Shape(format!("row has {} cells, header has {}", row.len(), self.header.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    /// CSV with numbers at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_num(*x),
                    Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// How a check's value is compared with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

/// A named numeric check against a registered tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, bound: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= bound,
            Relation::AtLeast => value >= bound,
            Relation::Below => value < bound,
            Relation::Above => value > bound,
        };
        Self { name: name.into(), value, relation, bound, passed }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, Relation::AtMost, bound)
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, Relation::AtLeast, bound)
    }

    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, Relation::Below, bound)
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, Relation::Above, bound)
    }

    pub fn describe(&self) -> String {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
            Relation::Above => ">",
        };
        format!("{}: {:.6e} {rel} {:.3e}", self.name, self.value, self.bound)
    }
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: String,
    pub table: Table,
    pub series: Vec<Series>,
    pub labels: PlotLabels,
    pub checks: Vec<Check>,
    /// Extra values reported in the summary but not checked.
    pub info: BTreeMap<String, Value>,
}

/// Paths written by [`Report::write`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub data: PathBuf,
    pub plot: PathBuf,
    pub summary: PathBuf,
}

impl Report {
    pub fn new(name: impl Into<String>, table: Table, labels: PlotLabels) -> Self {
        Self { name: name.into(), table, series: Vec::new(), labels, checks: Vec::new(), info: BTreeMap::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn info(&mut self, key: &str, value: impl Serialize) {
        self.info.insert(key.to_string(), json!(value));
    }

    pub fn summary(&self) -> Value {
        json!({
            "experiment": self.name,
            "passed": self.passed(),
            "checks": self.checks,
            "info": self.info,
        })
    }

    /// Writes `data.csv`, `plot.svg` and `summary.json` into `dir`, merging
    /// `extra` into the summary.
    pub fn write(&self, dir: &Path, extra: &BTreeMap<String, Value>) -> Result<Manifest> {
        std::fs::create_dir_all(dir)?;
        let m = Manifest { data: dir.join("data.csv"), plot: dir.join("plot.svg"), summary: dir.join("summary.json") };
        std::fs::write(&m.data, self.table.to_csv())?;
        emit_plot(&self.series, &self.labels, &m.plot)?;
        let mut summary = self.summary();
        if let Value::Object(map) = &mut summary {
            for (k, v) in extra {
                map.insert(k.clone(), v.clone());
            }
        }
        let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&m.summary, text + "\n")?;
        Ok(m)
    }
}
