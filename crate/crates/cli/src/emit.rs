use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use qtfock::scalar::{parse_rational, Real, Scalar};
use qtfock::{BivarPoly, Error, Result};
use serde_json::{json, Map, Value};

use crate::Output;

/// Output form of a scalar in each arithmetic mode.
pub trait Emit: Scalar {
    fn json(&self) -> Value;
    fn text(&self) -> String;
    /// `|x|` when the scalar is a number.
    fn magnitude(&self) -> Option<f64>;
    /// Equality for exact types, a relative `1e-10` comparison for doubles.
    fn matches(&self, other: &Self) -> bool {
        self == other
    }
}

impl Emit for f64 {
    fn json(&self) -> Value {
        json!(self)
    }

    fn text(&self) -> String {
        format!("{self}")
    }

    fn magnitude(&self) -> Option<f64> {
        Some(self.abs())
    }

    fn matches(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-10 * self.abs().max(other.abs()).max(1.0)
    }
}

impl Emit for BigRational {
    fn json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn text(&self) -> String {
        self.to_string()
    }

    fn magnitude(&self) -> Option<f64> {
        ToPrimitive::to_f64(&self.abs())
    }
}

impl Emit for BivarPoly {
    fn json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("polynomials serialize");
        if let Value::Object(m) = &mut v {
            m.insert("display".into(), Value::String(self.to_string()));
        }
        v
    }

    fn text(&self) -> String {
        self.to_string()
    }

    fn magnitude(&self) -> Option<f64> {
        None
    }
}

/// Scalars that can be read from a command-line parameter.
pub trait Param: Real + Emit {
    fn parse(s: &str) -> Result<Self>;
}

impl Param for f64 {
    fn parse(s: &str) -> Result<Self> {
        match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => parse_rational(s).map(|r| Real::to_f64(&r)),
        }
    }
}

impl Param for BigRational {
    fn parse(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

pub fn param<R: Param>(value: &Option<String>, name: &str) -> Result<Option<R>> {
    value
        .as_deref()
        .map(|s| R::parse(s).map_err(|_| Error::Invalid(format!("cannot parse --{name} {s:?}"))))
        .transpose()
}

pub fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Invalid(format!("missing required --{name}")))
}

/// Integer as a JSON number when it fits, as a string otherwise.
pub fn bigint_json(v: &num_bigint::BigInt) -> Value {
    match v.to_i64() {
        Some(i) => json!(i),
        None => Value::String(v.to_string()),
    }
}

/// Serializes `body` with a leading schema tag, or returns `csv` when CSV output was requested.
pub fn render(output: Output, schema: &str, body: Value, csv: Option<String>) -> Result<String> {
    match output {
        Output::Json => {
            let mut obj = Map::new();
            obj.insert("schema".into(), Value::String(format!("qtfock.{schema}/1")));
            if let Value::Object(m) = body {
                obj.extend(m);
            }
            Ok(serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize") + "\n")
        }
        Output::Csv => csv.ok_or_else(|| Error::Invalid(format!("{schema} has no CSV output; use --output json"))),
    }
}
