//! Experiment reports and their CSV/JSON emission.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{ExperimentConfig, Field};
use crate::error::{NhsError, Result};
use crate::report::float_repr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

mod opt_float {
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::Value;

    use crate::report::float_repr;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => serde::Serialize::serialize(&float_repr::to_value(*x), s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let v = Value::deserialize(d)?;
        if v.is_null() {
            return Ok(None);
        }
        float_repr::from_value(&v)
            .map(Some)
            .ok_or_else(|| serde::de::Error::custom("expected a number"))
    }
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub check: String,
    pub n: usize,
    pub generator: String,
    #[serde(with = "float_repr")]
    pub value: f64,
    #[serde(default, with = "opt_float")]
    pub lower: Option<f64>,
    #[serde(default, with = "opt_float")]
    pub upper: Option<f64>,
    #[serde(default)]
    pub witness: Value,
    pub status: Status,
    /// Whether a failure of this row is a failed exact identity.
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl ReportRow {
    pub fn field(&self, field: Field) -> Option<f64> {
        match field {
            Field::Value => Some(self.value),
            Field::Lower => self.lower,
            Field::Upper => self.upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub runtime_seconds: f64,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn row(&self, check: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.check == check)
    }

    /// A failed exact check, or any check that errored.
    pub fn has_exact_failure(&self) -> bool {
        self.rows
            .iter()
            .any(|r| r.status == Status::Fail && (r.exact || r.message.is_some()))
    }

    pub fn exit_code(&self) -> i32 {
        if self.has_exact_failure() {
            1
        } else {
            0
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

pub const CSV_HEADER: [&str; 8] = ["check", "n", "generator", "value", "lower", "upper", "witness", "pass"];

fn number(x: f64) -> String {
    // shortest round-trip form; non-finite values fall back to Display
    serde_json::Number::from_f64(x)
        .map(|n| n.to_string())
        .unwrap_or_else(|| format!("{x}"))
}

pub fn render_csv(report: &ExperimentReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| NhsError::Io(std::io::Error::other(e));
    writer.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in &report.rows {
        let witness = if row.witness.is_null() {
            String::new()
        } else {
            row.witness.to_string()
        };
        writer
            .write_record([
                row.check.clone(),
                row.n.to_string(),
                row.generator.clone(),
                number(row.value),
                row.lower.map(number).unwrap_or_default(),
                row.upper.map(number).unwrap_or_default(),
                witness,
                row.status.label().to_string(),
            ])
            .map_err(csv_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| NhsError::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| NhsError::Io(std::io::Error::other(e)))
}

pub fn render_json(report: &ExperimentReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Json => render_json(report)?,
        ReportFormat::Csv => render_csv(report)?,
    };
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}
