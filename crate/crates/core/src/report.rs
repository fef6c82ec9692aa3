//! Versioned JSON run reports.
//!
//! Writing is strict and deterministic: fields in declaration order, floats with 17 significant
//! digits in exponent form, non-finite numbers as `null`. Reading is tolerant: unknown fields are
//! ignored, `null` numbers become NaN, and any report with the same major schema version is
//! accepted.

use std::collections::BTreeMap;
use std::io;

use serde::de::Deserializer;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::backlund::Stats;
use crate::geometry::ChartPoint;

/// Current report schema version (`major.minor`).
pub const SCHEMA_VERSION: &str = "1.0";

/// The object a run was about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subject {
    /// `"pair"`, `"surface"` or `"normal-form"`.
    pub kind: String,
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
}

/// One requested check (or one part of a composite check).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub satisfied: bool,
    #[serde(deserialize_with = "nullable_f64")]
    pub worst_residual: f64,
    #[serde(default)]
    pub witness_point: Option<ChartPoint>,
    #[serde(deserialize_with = "nullable_f64")]
    pub tolerance: f64,
    /// Sub-checks of a composite check (e.g. the seven conditions).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CheckRecord>,
    /// Free-form failure explanation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Scalar summaries over the grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summaries {
    #[serde(default)]
    pub psi: Option<Stats>,
    #[serde(default)]
    pub h: Option<Stats>,
    #[serde(default)]
    pub hhat: Option<Stats>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub case_label: Option<String>,
    /// Further named scalars, sorted by name.
    #[serde(default)]
    pub scalars: BTreeMap<String, Option<f64>>,
}

/// A complete run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub subject: Subject,
    pub grid: [usize; 2],
    pub order: usize,
    #[serde(deserialize_with = "nullable_f64")]
    pub tol_alg: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub tol_diff: f64,
    pub all_satisfied: bool,
    pub checks: Vec<CheckRecord>,
    #[serde(default)]
    pub summaries: Summaries,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

fn nullable_f64<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// Failure to read a report.
#[derive(Debug, thiserror::Error)]
pub enum ReportReadError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {found:?} (expected major version of {SCHEMA_VERSION})")]
    Version { found: String },
}

fn major(v: &str) -> Option<&str> {
    let m = v.split('.').next()?;
    (!m.is_empty() && m.bytes().all(|b| b.is_ascii_digit())).then_some(m)
}

/// Parse a report, accepting unknown fields and any minor version of the current major version.
pub fn read_report(text: &str) -> Result<Report, ReportReadError> {
    let report: Report = serde_json::from_str(text)?;
    if major(&report.schema_version).is_none() || major(&report.schema_version) != major(SCHEMA_VERSION) {
        return Err(ReportReadError::Version {
            found: report.schema_version,
        });
    }
    Ok(report)
}

/// Pretty-printing JSON formatter that writes floats as `{:.16e}` (17 significant digits).
struct FixedFloat(PrettyFormatter<'static>);

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialize any value with the fixed float format (pretty-printed, trailing newline).
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloat(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types serialize infallibly");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// Serialize a report.
pub fn write_report(report: &Report) -> String {
    to_json_string(report)
}

/// Human-readable description of the report layout (printed by the `schema` command).
pub fn report_schema() -> serde_json::Value {
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "number_format": "17 significant digits in exponent form; non-finite values are null",
        "fields": {
            "schema_version": "string, major.minor; readers accept any minor version of their major",
            "subject": {"kind": "pair | surface | normal-form", "name": "catalog entry", "params": "object name -> number", "expression": "string, graph surfaces only"},
            "grid": "[nu, nv]",
            "order": "jet order",
            "tol_alg": "tolerance of algebraic conditions",
            "tol_diff": "tolerance of differential conditions",
            "all_satisfied": "bool, conjunction of all checks",
            "checks": [{
                "name": "check name",
                "satisfied": "bool",
                "worst_residual": "number or null",
                "witness_point": "{u, v} of the worst residual, or null",
                "tolerance": "number",
                "parts": "optional array of sub-checks with the same layout",
                "message": "optional string"
            }],
            "summaries": {
                "psi": "{min, max, mean} or null",
                "h": "{min, max, mean} or null",
                "hhat": "{min, max, mean} or null",
                "kappa": "number or null",
                "case_label": "string or null",
                "scalars": "object name -> number or null"
            },
            "diagnostics": "array of strings"
        }
    })
}
