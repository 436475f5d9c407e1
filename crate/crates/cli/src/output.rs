//! Tables, number formatting and the CSV / JSON writers.
//!
//! Exact values render as `p/q` (or a bare integer), real values as 17
//! significant digits, so every emitted number parses back to the value that
//! produced it.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use jpurn_core::Rational;
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

/// Text rendering of a scalar.
pub trait Render {
    fn render(&self) -> String;
}

impl Render for f64 {
    fn render(&self) -> String {
        format!("{:.16e}", self)
    }
}

impl Render for Rational {
    fn render(&self) -> String {
        self.to_string()
    }
}

/// Parses `p/q`, an integer, or a decimal literal such as `-0.25` or `1e-3`
/// into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(Rational::from_integer(n));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut v = Rational::from_integer(digits);
    if scale >= 0 {
        v *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -v } else { v })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
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
        Cell::Text(v.to_string())
    }
}

impl<T: Render> From<Option<&T>> for Cell {
    fn from(v: Option<&T>) -> Self {
        v.map_or(Cell::Empty, |v| Cell::Text(v.render()))
    }
}

/// Rows with a fixed header plus the metadata that goes into the JSON
/// envelope.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub meta: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            meta: Map::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).map_err(anyhow::Error::from)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(anyhow::Error::from)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(String::from_utf8(bytes).map_err(anyhow::Error::from)?)
    }

    pub fn to_json(&self) -> Value {
        let mut env = Map::new();
        env.insert("schema".into(), json!(SCHEMA_VERSION));
        env.insert("command".into(), json!(self.command));
        for (k, v) in &self.meta {
            env.insert(k.clone(), v.clone());
        }
        env.insert("columns".into(), json!(self.columns));
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        env.insert("rows".into(), Value::Array(rows));
        Value::Object(env)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(pretty(&self.to_json())),
            Format::Dot => Err(CliError::Usage(format!("{} has no DOT output", self.command))),
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| anyhow::anyhow!("writing {}: {e}", p.display()))?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(anyhow::Error::from)?;
            out.flush().map_err(anyhow::Error::from)?;
        }
    }
    Ok(())
}
