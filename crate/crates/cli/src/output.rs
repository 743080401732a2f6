//! CSV and JSON emission.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::error::CliError;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Real(x) => real(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Real)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<u32> for Cell {
    fn from(k: u32) -> Self {
        Cell::Int(i64::from(k))
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// 17 significant digits in scientific notation.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Result of one subcommand.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    /// Fully resolved parameters, echoed into both outputs.
    pub config: Value,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
    /// `None` for commands that only tabulate.
    pub pass: Option<bool>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, config: Value, columns: &'static [&'static str]) -> Report {
        Report {
            command,
            config,
            columns,
            rows: Vec::new(),
            summary: json!({}),
            pass: None,
            warnings: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }

    pub fn write_csv<W: Write>(&self, out: W, timestamp: Option<&str>) -> Result<(), CliError> {
        let mut out = io::BufWriter::new(out);
        writeln!(
            out,
            "# logevo {} {}",
            env!("CARGO_PKG_VERSION"),
            self.command
        )?;
        if let Some(ts) = timestamp {
            writeln!(out, "# generated: {ts}")?;
        }
        writeln!(out, "# config: {}", self.config)?;
        for w in &self.warnings {
            writeln!(out, "# warning: {w}")?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json(&self, timestamp: Option<&str>) -> Value {
        let mut v = json!({
            "schema": crate::config::SCHEMA,
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "pass": self.pass,
            "rows": self.rows.len(),
            "summary": self.summary,
            "warnings": self.warnings,
        });
        if let Some(ts) = timestamp {
            v["generated"] = json!(ts);
        }
        v
    }
}

/// Opens `path` for writing; `-` is standard output.
pub fn sink(path: &Path) -> Result<Box<dyn Write>, CliError> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        Ok(Box::new(File::create(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_seventeen_digits() {
        assert_eq!(real(0.25), "2.5000000000000000e-1");
        assert_eq!(real(-2.0), "-2.0000000000000000e0");
        let x = 0.1 + 0.2;
        assert_eq!(real(x).parse::<f64>().unwrap(), x);
        assert_eq!(real(f64::NAN), "NaN");
    }

    #[test]
    fn csv_has_preamble_then_header() {
        let mut r = Report::new("demo", json!({"a": 1}), &["x", "note"]);
        r.push(vec![Cell::Real(1.0), Cell::from("a,b")]);
        r.warn("careful");
        let mut buf = Vec::new();
        r.write_csv(&mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# logevo "));
        assert_eq!(lines[1], "# config: {\"a\":1}");
        assert_eq!(lines[2], "# warning: careful");
        assert_eq!(lines[3], "x,note");
        assert_eq!(lines[4], "1.0000000000000000e0,\"a,b\"");
        assert!(!text.contains('\r'));
    }
}
