//! Verification reports and their deterministic JSON encoding.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One named pass/fail verdict with its worst observed value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub worst_value: f64,
    pub location: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, worst_value: f64, location: Value) -> Self {
        Self {
            name: name.into(),
            passed,
            worst_value,
            location,
        }
    }

    /// Passes when `value <= bound` (NaN fails).
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, location: Value) -> Self {
        Self::new(name, value <= bound, value, location)
    }

    /// Passes when `value >= bound` (NaN fails).
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, location: Value) -> Self {
        Self::new(name, value >= bound, value, location)
    }

    /// Counts violations; passes when there are none.
    pub fn violations(name: impl Into<String>, count: usize, location: Value) -> Self {
        Self::new(name, count == 0, count as f64, location)
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}/{}", self.name);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub version: String,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl VerificationReport {
    pub fn new(
        command: &str,
        parameters: BTreeMap<String, String>,
        seed: u64,
        checks: Vec<Check>,
        data: Value,
    ) -> Self {
        Self {
            command: command.into(),
            parameters,
            seed,
            version: VERSION.into(),
            checks,
            data,
            wall_time: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Compact JSON with every float written as 17 significant digits.
struct Precise;

impl Formatter for Precise {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` deterministically; non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise);
    value
        .serialize(&mut ser)
        .expect("report values are serializable");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes utf-8")
}

/// `serde_json::Value` for any serializable value, with NaN mapped to null.
pub fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}
