//! Versioned report document and its serialization.
//!
//! Reports round-trip losslessly: floats are written with 17 significant
//! digits, which pins every f64 bit pattern, and runs with the same inputs
//! and seed produce byte-identical documents. p-values below 1e-300 are
//! serialized as the string `"<1e-300"`.

use std::io;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::Result;
use crate::null::diagnostics::DiagnosticsReport;
use crate::null::family::EdgeModel;
use crate::null::fit::ModelComparison;
use crate::sim::BootstrapSummary;

/// Smallest p-value reported as a number.
pub const P_FLOOR: f64 = 1e-300;

/// A p-value that may have fallen below the reporting floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValue {
    Value(f64),
    BelowFloor,
}

impl From<f64> for PValue {
    fn from(p: f64) -> Self {
        if p < P_FLOOR {
            PValue::BelowFloor
        } else {
            PValue::Value(p)
        }
    }
}

impl PValue {
    /// The numeric value, if above the floor.
    pub fn as_f64(self) -> Option<f64> {
        match self {
            PValue::Value(v) => Some(v),
            PValue::BelowFloor => None,
        }
    }

    /// Upper bound on the p-value: the value itself, or the floor.
    pub fn upper_bound(self) -> f64 {
        match self {
            PValue::Value(v) => v,
            PValue::BelowFloor => P_FLOOR,
        }
    }
}

impl Serialize for PValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            PValue::Value(v) => serializer.serialize_f64(v),
            PValue::BelowFloor => serializer.serialize_str("<1e-300"),
        }
    }
}

impl<'de> Deserialize<'de> for PValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PVisitor;
        impl Visitor<'_> for PVisitor {
            type Value = PValue;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or the string \"<1e-300\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<PValue, E> {
                Ok(PValue::Value(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<PValue, E> {
                Ok(PValue::Value(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<PValue, E> {
                Ok(PValue::Value(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<PValue, E> {
                if v == "<1e-300" {
                    Ok(PValue::BelowFloor)
                } else {
                    Err(E::custom(format!("unexpected p-value string {v:?}")))
                }
            }
        }
        deserializer.deserialize_any(PVisitor)
    }
}

/// Size and degree digest of the analyzed graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: f64,
    pub degree_quartiles: (f64, f64, f64),
}

/// The fitted null model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBlock {
    pub model: EdgeModel,
    /// Absent when the model was specified rather than fitted (simulation).
    pub log_likelihood: Option<f64>,
    /// n degree parameters plus the family's extra parameters.
    pub parameter_count: usize,
    /// 2 (saturated - model) log-likelihood; absent for the Bernoulli
    /// family, whose saturated likelihood is not the count one.
    pub residual_deviance: Option<f64>,
    pub r_at_cap: bool,
    pub warnings: Vec<String>,
}

/// One covariate's test results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestBlock {
    pub covariate: Option<String>,
    /// Number of groups.
    pub k: usize,
    /// Nodes actually tested, after any drops.
    pub n_used: usize,
    pub q_hat: f64,
    pub b_hat: f64,
    pub s_hat: f64,
    pub z: f64,
    pub p_normal: PValue,
    pub p_bootstrap: Option<f64>,
    /// `min(1, p_normal * bonferroni_m)`, present only when a correction
    /// factor was requested. The correction is applied by this tool.
    pub p_bonferroni: Option<PValue>,
    pub bonferroni_m: Option<usize>,
    pub bootstrap: Option<BootstrapSummary>,
    pub diagnostics: DiagnosticsReport,
    pub warnings: Vec<String>,
}

/// Top-level report emitted by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    /// Unix seconds; populated only from SOURCE_DATE_EPOCH so identical
    /// runs stay byte-identical.
    pub generated_at: Option<i64>,
    /// Subcommand that produced the report.
    pub command: String,
    pub seed: Option<u64>,
    pub graph: GraphSummary,
    pub model: Option<ModelBlock>,
    pub tests: Vec<TestBlock>,
    pub model_comparison: Option<ModelComparison>,
    pub diagnostics: Option<DiagnosticsReport>,
    pub warnings: Vec<String>,
}

pub const SCHEMA_VERSION: u32 = 1;

impl ReportDocument {
    pub fn new(command: &str, graph: GraphSummary) -> ReportDocument {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            generated_at: std::env::var("SOURCE_DATE_EPOCH")
                .ok()
                .and_then(|v| v.parse().ok()),
            command: command.into(),
            seed: None,
            graph,
            model: None,
            tests: Vec::new(),
            model_comparison: None,
            diagnostics: None,
            warnings: Vec::new(),
        }
    }

    /// Pretty JSON with 17-significant-digit floats.
    ///
    /// The output is verified to parse back to an equal document before it
    /// is returned. serde_json encodes non-finite floats as `null` rather
    /// than erroring, so without this check a NaN statistic would produce a
    /// silently corrupt report.
    pub fn to_json_string(&self) -> Result<String> {
        let mut out = Vec::new();
        let mut ser =
            serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter::new());
        self.serialize(&mut ser)?;
        let json = String::from_utf8(out).expect("serializer emits UTF-8");
        match ReportDocument::from_json_str(&json) {
            Ok(back) if back == *self => Ok(json),
            _ => Err(crate::error::Error::InvalidParameter(
                "report did not survive serialization; it contains non-finite numbers".into(),
            )),
        }
    }

    pub fn from_json_str(s: &str) -> Result<ReportDocument> {
        Ok(serde_json::from_str(s)?)
    }

    /// One CSV row per test block, for spreadsheet use.
    pub fn csv_summary(&self) -> String {
        let mut out = String::from(
            "covariate,k,n_used,q_hat,b_hat,s_hat,z,p_normal,p_bootstrap,p_bonferroni\n",
        );
        for t in &self.tests {
            let p = |v: PValue| match v {
                PValue::Value(x) => format!("{x:.16e}"),
                PValue::BelowFloor => "<1e-300".to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}\n",
                t.covariate.as_deref().unwrap_or(""),
                t.k,
                t.n_used,
                t.q_hat,
                t.b_hat,
                t.s_hat,
                t.z,
                p(t.p_normal),
                t.p_bootstrap.map_or(String::new(), |v| format!("{v:.16e}")),
                t.p_bonferroni.map_or(String::new(), &p),
            ));
        }
        out
    }
}

/// Pretty JSON formatter writing floats with 17 significant digits, enough
/// to reproduce every f64 exactly on parse. Rejects non-finite values
/// instead of emitting invalid JSON.
struct SigDigitFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl SigDigitFormatter<'_> {
    fn new() -> Self {
        SigDigitFormatter {
            inner: PrettyFormatter::new(),
        }
    }
}

impl Formatter for SigDigitFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("cannot serialize non-finite float {value}"),
            ));
        }
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}
