//! Tables and verdicts, emitted as CSV or JSON.
//!
//! CSV writes the table with its header to the output; verdicts go to
//! stderr. JSON writes one object `{config, rows, verdicts}`. Non-finite
//! floats are written as the strings `nan`, `inf`, `-inf` in both formats.

use std::io::Write;

use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => float_text(*x),
            Cell::Text(t) => t.clone(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) if x.is_finite() => Value::from(*x),
            Cell::Float(x) => Value::String(float_text(*x)),
            Cell::Text(t) => Value::String(t.clone()),
        }
    }
}

/// 17 significant digits.
pub fn float_text(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
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

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(if b { "true" } else { "false" }.into())
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    /// `value <= threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    /// `value` inside `[lo, hi]`; the threshold column records `hi`.
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: hi,
            pass: value >= lo && value <= hi,
        }
    }

    /// Reported number with no pass condition.
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: f64::NAN,
            pass: true,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            pass: ok,
        }
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("value".into(), Cell::Float(self.value).json());
        m.insert("threshold".into(), Cell::Float(self.threshold).json());
        m.insert("pass".into(), Value::Bool(self.pass));
        Value::Object(m)
    }
}

pub struct Report {
    pub table: Table,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

pub fn render_json(cfg: &RunConfig, report: &Report) -> anyhow::Result<String> {
    let mut config = Map::new();
    for (k, v) in cfg.entries()? {
        config.insert(k.into(), v);
    }
    let rows: Vec<Value> = report
        .table
        .rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            for (c, v) in report.table.columns.iter().zip(r) {
                m.insert((*c).into(), v.json());
            }
            Value::Object(m)
        })
        .collect();
    let mut top = Map::new();
    top.insert("config".into(), Value::Object(config));
    top.insert("rows".into(), Value::Array(rows));
    top.insert(
        "verdicts".into(),
        Value::Array(report.verdicts.iter().map(Verdict::json).collect()),
    );
    Ok(serde_json::to_string_pretty(&Value::Object(top))? + "\n")
}

pub fn render_csv(table: &Table) -> anyhow::Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for r in &table.rows {
        w.write_record(r.iter().map(Cell::csv))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn verdict_line(v: &Verdict) -> String {
    format!(
        "verdict,{},{},{},{}",
        v.name,
        float_text(v.value),
        float_text(v.threshold),
        if v.pass { "PASS" } else { "FAIL" }
    )
}

/// Writes the report to `--out` or stdout.
pub fn emit(cfg: &RunConfig, report: &Report) -> anyhow::Result<()> {
    let body = match cfg.format {
        Format::Csv => {
            let mut err = std::io::stderr().lock();
            for v in &report.verdicts {
                writeln!(err, "{}", verdict_line(v))?;
            }
            render_csv(&report.table)?
        }
        Format::Json => render_json(cfg, report)?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}
