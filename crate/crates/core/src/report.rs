//! Check reports shared by every validator.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Outcome of a single check, serialized as
/// `{ "check", "pass", "worst_witness", "value" }` plus optional details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    #[serde(default)]
    pub worst_witness: Value,
    #[serde(with = "float_repr")]
    pub value: f64,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, pass: bool, value: f64) -> Self {
        Self {
            check: check.into(),
            pass,
            worst_witness: Value::Null,
            value,
            details: Map::new(),
        }
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.worst_witness = witness;
        self
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    /// Like [`with_detail`](Self::with_detail) for floats that may be infinite.
    pub fn with_number(self, key: &str, value: f64) -> Self {
        self.with_detail(key, float_repr::to_value(value))
    }
}

/// JSON has no representation for infinities or NaN; those are written as
/// strings and read back. Finite values use the shortest round-trip form.
pub mod float_repr {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::Value;

    pub fn to_value(x: f64) -> Value {
        if x.is_finite() {
            Value::from(x)
        } else {
            Value::String(label(x).to_string())
        }
    }

    pub fn from_value(v: &Value) -> Option<f64> {
        match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => parse_label(s),
            _ => None,
        }
    }

    fn label(x: f64) -> &'static str {
        if x.is_nan() {
            "nan"
        } else if x > 0.0 {
            "inf"
        } else {
            "-inf"
        }
    }

    fn parse_label(s: &str) -> Option<f64> {
        match s {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            other => other.parse().ok(),
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(label(*x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let v = Value::deserialize(d)?;
        from_value(&v).ok_or_else(|| D::Error::custom(format!("not a number: {v}")))
    }
}
