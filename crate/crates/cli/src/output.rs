//! File emission. Every file starts with the tool version, verb, config hash
//! and seed in whatever comment syntax its format allows.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use lptv_core::Complex64 as C64;
use serde_json::{json, Map, Value};

use crate::CliError;

pub const TOOL: &str = "lptv";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct Meta {
    pub verb: &'static str,
    pub hash: String,
    pub seed: u64,
}

impl Meta {
    pub fn line(&self) -> String {
        format!(
            "{TOOL} {VERSION} verb={} config_sha256={} seed={}",
            self.verb, self.hash, self.seed
        )
    }

    fn json(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "verb": self.verb,
            "config_sha256": self.hash,
            "seed": self.seed,
        })
    }
}

/// Round-trip representation with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => num(*x),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::I(i) => json!(i),
            Cell::B(b) => json!(b),
            Cell::S(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn csv(&self, meta: &Meta) -> String {
        let mut s = format!("# {}\n{}\n", meta.line(), self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Rows as objects keyed by column name.
    pub fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let mut o = Map::new();
                    for (c, v) in self.columns.iter().zip(r) {
                        o.insert(c.clone(), v.json());
                    }
                    Value::Object(o)
                })
                .collect(),
        )
    }

    /// Writes `<stem>.csv` or `<stem>.json` and returns the path.
    pub fn write(&self, dir: &Path, stem: &str, format: Format, meta: &Meta) -> Result<PathBuf, CliError> {
        match format {
            Format::Csv => {
                let p = dir.join(format!("{stem}.csv"));
                fs::write(&p, self.csv(meta))?;
                Ok(p)
            }
            Format::Json => write_json(dir, &format!("{stem}.json"), meta, json!({ "columns": self.columns, "rows": self.json_rows() })),
        }
    }
}

/// Writes `body` (an object) with a leading "meta" member.
pub fn write_json(dir: &Path, name: &str, meta: &Meta, body: Value) -> Result<PathBuf, CliError> {
    let mut o = Map::new();
    o.insert("meta".into(), meta.json());
    match body {
        Value::Object(m) => o.extend(m),
        other => {
            o.insert("data".into(), other);
        }
    }
    let p = dir.join(name);
    let mut text = serde_json::to_string_pretty(&Value::Object(o)).expect("serialising JSON");
    text.push('\n');
    fs::write(&p, text)?;
    Ok(p)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let p = dir.join(name);
    fs::write(&p, text)?;
    Ok(p)
}

/// Touchstone v1 three-port file, RI format. Each frequency takes three
/// lines, one per matrix row: f S11 S12 S13 / S21 S22 S23 / S31 S32 S33.
pub fn touchstone(meta: &Meta, z0: f64, rows: &[(f64, [[C64; 3]; 3])]) -> String {
    let mut s = format!("! {}\n# Hz S RI R {z0}\n", meta.line());
    for (f, m) in rows {
        for (q, row) in m.iter().enumerate() {
            if q == 0 {
                s.push_str(&num(*f));
            } else {
                s.push_str(&" ".repeat(num(*f).len()));
            }
            for z in row {
                let _ = write!(s, " {} {}", num(z.re), num(z.im));
            }
            s.push('\n');
        }
    }
    s
}
