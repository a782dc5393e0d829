//! CSV and JSON rendering at a fixed number of significant digits.

use crate::config::Format;
use crate::error::Result;
use qnm_core::chart::fmt_sig;
use serde_json::Value;
use std::io::Write;
use std::path::Path;

/// A command result in both output shapes.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub csv: String,
    pub json: Value,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).unwrap_or_default();
                s.push('\n');
                s
            }
        }
    }
}

/// Rounds every float in a JSON tree to `digits` significant digits.
pub fn round_json(v: Value, digits: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r = fmt_sig(x, digits).parse::<f64>().unwrap_or(x);
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(|x| round_json(x, digits)).collect()),
        Value::Object(m) => Value::Object(
            m.into_iter()
                .map(|(k, x)| (k, round_json(x, digits)))
                .collect(),
        ),
        other => other,
    }
}

/// Builds a CSV document from string rows.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes())?;
            s.flush()?;
        }
    }
    Ok(())
}
