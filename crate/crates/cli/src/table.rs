//! Result tables and their CSV / JSON encodings.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
    Null,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Null, Into::into)
    }
}

impl Cell {
    /// 17 significant digits for floats so values round-trip exactly.
    fn csv(&self) -> String {
        match self {
            Cell::F(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::F(x) => x.to_string(),
            Cell::I(i) => i.to_string(),
            Cell::S(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::I(i) => json!(i),
            Cell::S(s) => json!(s),
            Cell::B(b) => json!(b),
            Cell::Null => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Everything a command produces besides plots.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub diagnostics: Map<String, Value>,
}

pub fn render(report: &Report, config: &RunConfig) -> anyhow::Result<String> {
    Ok(match config.format {
        Format::Csv => report.table.to_csv(),
        Format::Json => {
            let doc = json!({
                "config": serde_json::to_value(config)?,
                "results": report.table.to_json_rows(),
                "diagnostics": Value::Object(report.diagnostics.clone()),
                "version": env!("CARGO_PKG_VERSION"),
            });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
    })
}

pub fn emit(text: &str, config: &RunConfig) -> anyhow::Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| crate::config::config_error(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
