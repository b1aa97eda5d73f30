use std::io::Write;

use anyhow::Result;
use clap::{Args, ValueEnum};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub emit: Format,
}

/// What a command produces: a JSON document, the rows used for CSV, and
/// whether a check failed.
pub struct Report {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub failed: bool,
}

impl Report {
    pub fn new(json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Self { json, header, rows, failed: false }
    }

    pub fn failed(mut self, failed: bool) -> Self {
        self.failed = failed;
        self
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

/// Rounds to 12 significant digits, so output does not depend on the last
/// bits of floating-point evaluation order.
pub fn sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// A JSON number rounded to 12 significant digits; non-finite values
/// become strings.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        serde_json::json!(sig(v))
    } else if v.is_nan() {
        Value::String("nan".into())
    } else if v > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn cell(v: f64) -> String {
    sig(v).to_string()
}
