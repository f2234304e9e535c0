//! Verification reports and their deterministic JSON encoding.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use crate::algebra::RatFun;
use crate::error::Result;

pub const EXACT_ZERO: &str = "0 (exact)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckKind {
    #[serde(rename = "exact-symbolic")]
    Exact,
    #[serde(rename = "numeric")]
    Numeric,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    /// `"0 (exact)"` for a passing exact check, a number otherwise.
    pub residual: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Check {
    /// Passes iff `residual` is the zero function. On failure the message
    /// names the leading term of the surviving numerator.
    pub fn exact(name: &str, residual: &RatFun) -> Self {
        if residual.is_zero() {
            Self::exact_ok(name)
        } else {
            Self {
                name: name.into(),
                kind: CheckKind::Exact,
                passed: false,
                residual: Value::from(residual.num().max_abs_coeff()),
                message: Some(residual.describe_numerator()),
            }
        }
    }

    pub fn exact_ok(name: &str) -> Self {
        Self { name: name.into(), kind: CheckKind::Exact, passed: true, residual: EXACT_ZERO.into(), message: None }
    }

    /// An exact predicate with no residual function of its own; `why` explains
    /// a failure.
    pub fn exact_predicate(name: &str, holds: bool, why: impl FnOnce() -> String) -> Self {
        if holds {
            Self::exact_ok(name)
        } else {
            Self { name: name.into(), kind: CheckKind::Exact, passed: false, residual: Value::from(1.0), message: Some(why()) }
        }
    }

    /// Passes iff `residual` is finite and at most `tol`.
    pub fn numeric(name: &str, residual: f64, tol: f64) -> Self {
        let passed = residual.is_finite() && residual <= tol;
        Self {
            name: name.into(),
            kind: CheckKind::Numeric,
            passed,
            residual: Value::from(residual),
            message: (!passed).then(|| format!("residual {residual:e} exceeds tolerance {tol:e}")),
        }
    }

    /// A numeric condition that is not a tolerance test, reported with the
    /// quantity it was decided on.
    pub fn numeric_predicate(name: &str, value: f64, passed: bool, why: impl FnOnce() -> String) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Numeric,
            passed,
            residual: Value::from(value),
            message: (!passed).then(why),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub command: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Command-specific results; keys are emitted in sorted order.
    #[serde(flatten)]
    pub data: Map<String, Value>,
}

impl VerifyReport {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), passed: true, checks: Vec::new(), data: Map::new() }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.data.insert(key.into(), v.into());
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

/// Pretty JSON with every float written to 17 significant digits, so the same
/// value always produces the same bytes.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigs(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

struct SigFigs<'a>(PrettyFormatter<'a>);

impl Formatter for SigFigs<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
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
