//! Tabular output in CSV or JSON, plus the key=value run manifest.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i128),
    Num(f64),
    Text(String),
    Empty,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Fifteen significant digits.
pub fn sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.14e}")
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => sig15(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v as i64),
            // round through the printed form so JSON and CSV carry the same digits
            Cell::Num(v) => sig15(*v).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Table { headers, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String, Box<dyn std::error::Error>> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::text))?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.headers.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                Ok(serde_json::to_string_pretty(&Value::Array(rows))? + "\n")
            }
        }
    }
}

/// Ordered key=value record describing how an output was produced.
#[derive(Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={}", v.replace('\n', " "));
        }
        out
    }
}

/// Writes the table to `path` with the manifest beside it, or the table to
/// stdout and the manifest to stderr.
pub fn emit(text: &str, manifest: &Manifest, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            let mut m = p.as_os_str().to_owned();
            m.push(".manifest");
            std::fs::write(m, manifest.render())
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            let mut err = std::io::stderr();
            for line in manifest.render().lines() {
                writeln!(err, "# {line}")?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(sig15(1.0 / 3.0), "3.33333333333333e-1");
        assert_eq!(sig15(11_370_000.0), "1.13700000000000e7");
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(-0.0), "0");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(vec!["pattern", "count", "value", "note"]);
        t.push(vec!["(1,2)".into(), 7u64.into(), (2.0f64).sqrt().into(), Cell::Empty]);
        let csv = t.render(Format::Csv).unwrap();
        assert_eq!(csv, "pattern,count,value,note\n\"(1,2)\",7,1.41421356237310e0,\n");
        let json: Value = serde_json::from_str(&t.render(Format::Json).unwrap()).unwrap();
        assert_eq!(json[0]["count"], 7);
        assert_eq!(json[0]["value"].as_f64().unwrap(), 1.41421356237310);
        assert!(json[0]["note"].is_null());
    }

    #[test]
    fn manifest_keys_are_unique_and_ordered() {
        let mut m = Manifest::default();
        m.set("q", 3);
        m.set("P", 10);
        m.set("q", 4);
        assert_eq!(m.render(), "q=4\nP=10\n");
    }
}
