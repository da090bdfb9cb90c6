//! Dynamic values passed along graph edges and written to output cells.

use std::fmt;

use thiserror::Error;

/// Error raised when a tensor's data does not match its shape.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tensor shape {shape:?} needs {expected} entries, got {actual}")]
pub struct ShapeError {
    pub shape: Vec<usize>,
    pub expected: usize,
    pub actual: usize,
}

/// Dense row-major tensor of 64-bit reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, ShapeError> {
        let expected = shape.iter().product::<usize>();
        if shape.is_empty() || shape.contains(&0) || expected != data.len() {
            return Err(ShapeError {
                shape,
                expected,
                actual: data.len(),
            });
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self, ShapeError> {
        let len = shape.iter().product::<usize>();
        Tensor::new(shape, vec![0.0; len])
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_parts(self) -> (Vec<usize>, Vec<f64>) {
        (self.shape, self.data)
    }
}

/// A value produced by a node's expression.
#[derive(Debug, Clone)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    List(Vec<Value>),
    Tensor(Tensor),
    /// Entry removed by a missing-data mechanism.
    Missing,
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Str(_) => "str",
            Value::List(_) => "list",
            Value::Tensor(_) => "tensor",
            Value::Missing => "missing",
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    /// Numeric view with Int promoted to Float.
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(i) => Some(i as f64),
            Value::Float(x) => Some(x),
            _ => None,
        }
    }

    /// Integer view; floats qualify only when they hold an exact integer.
    pub fn as_i64(&self) -> Option<i64> {
        match *self {
            Value::Int(i) => Some(i),
            Value::Float(x) if x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15 => {
                Some(x as i64)
            }
            _ => None,
        }
    }

    /// Strict truth coercion: `Bool` as is, `Int` 0 and 1 only.
    pub fn as_flag(&self) -> Option<bool> {
        match *self {
            Value::Bool(b) => Some(b),
            Value::Int(0) => Some(false),
            Value::Int(1) => Some(true),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(
            self,
            Value::Bool(_) | Value::Int(_) | Value::Float(_) | Value::Str(_)
        )
    }
}

/// Name of the value's kind as used in diagnostics.
pub fn type_name(v: &Value) -> &'static str {
    v.type_name()
}

/// Structural equality with Int/Float promotion.
///
/// `Int(k)` equals `Float(x)` iff `x` is exactly `k`. `Missing` equals only
/// `Missing`. Floats compare with IEEE semantics except that NaN equals NaN,
/// so that serialized values can round-trip.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    use Value::*;
    match (a, b) {
        (Bool(x), Bool(y)) => x == y,
        (Int(x), Int(y)) => x == y,
        (Float(x), Float(y)) => floats_equal(*x, *y),
        (Int(i), Float(x)) | (Float(x), Int(i)) => int_equals_float(*i, *x),
        (Str(x), Str(y)) => x == y,
        (List(xs), List(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| values_equal(x, y))
        }
        (Tensor(s), Tensor(t)) => {
            s.shape == t.shape
                && s.data
                    .iter()
                    .zip(&t.data)
                    .all(|(x, y)| floats_equal(*x, *y))
        }
        (Missing, Missing) => true,
        _ => false,
    }
}

fn floats_equal(x: f64, y: f64) -> bool {
    x == y || (x.is_nan() && y.is_nan())
}

/// 2^63: floats in `[-2^63, 2^63)` convert to i64 exactly when integral.
pub(crate) const I64_SPAN: f64 = 9_223_372_036_854_775_808.0;

fn int_equals_float(i: i64, x: f64) -> bool {
    // i64 -> f64 may round, so compare in the integer domain.
    x.fract() == 0.0 && (-I64_SPAN..I64_SPAN).contains(&x) && x as i64 == i
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        values_equal(self, other)
    }
}

/// Shortest decimal text that round-trips to the same `f64`.
///
/// Integral values keep a trailing `.0` so floats stay distinguishable from
/// integers; very large or small magnitudes use exponent notation.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:?}")
    }
}

/// Render a value as the text of one CSV cell (before CSV quoting).
pub fn csv_cell(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Int(i) => i.to_string(),
        Value::Float(x) => format_float(*x),
        Value::Str(s) => s.clone(),
        Value::Missing => String::new(),
        Value::List(_) | Value::Tensor(_) => {
            let mut out = String::new();
            write_nested(v, &mut out);
            out
        }
    }
}

fn write_nested(v: &Value, out: &mut String) {
    match v {
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(i) => out.push_str(&i.to_string()),
        Value::Float(x) => out.push_str(&format_float(*x)),
        Value::Str(s) => out.push_str(&serde_json::Value::String(s.clone()).to_string()),
        Value::Missing => out.push_str("null"),
        Value::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_nested(item, out);
            }
            out.push(']');
        }
        Value::Tensor(t) => {
            out.push_str("{\"shape\":[");
            let dims: Vec<String> = t.shape.iter().map(|d| d.to_string()).collect();
            out.push_str(&dims.join(","));
            out.push_str("],\"data\":[");
            let data: Vec<String> = t.data.iter().map(|x| format_float(*x)).collect();
            out.push_str(&data.join(","));
            out.push_str("]}");
        }
    }
}

/// Parse a cell produced by [`csv_cell`] back into a value.
///
/// The cell text carries no type tag, so a few inputs are ambiguous: strings
/// that read as a number, a boolean, the empty string or bracketed text come
/// back as that other kind. Non-finite floats inside lists and tensors are
/// not representable.
pub fn parse_cell(cell: &str) -> Value {
    if cell.is_empty() {
        return Value::Missing;
    }
    match cell {
        "true" => return Value::Bool(true),
        "false" => return Value::Bool(false),
        "NaN" => return Value::Float(f64::NAN),
        "inf" => return Value::Float(f64::INFINITY),
        "-inf" => return Value::Float(f64::NEG_INFINITY),
        _ => {}
    }
    if looks_numeric(cell) {
        if let Ok(i) = cell.parse::<i64>() {
            return Value::Int(i);
        }
        if let Ok(x) = cell.parse::<f64>() {
            return Value::Float(x);
        }
    }
    if cell.starts_with('[') || cell.starts_with("{\"shape\"") {
        if let Ok(json) = serde_json::from_str::<serde_json::Value>(cell) {
            if let Some(v) = from_json(&json) {
                return v;
            }
        }
    }
    Value::Str(cell.to_string())
}

fn looks_numeric(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    body.starts_with(|c: char| c.is_ascii_digit())
        && body
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
}

fn from_json(json: &serde_json::Value) -> Option<Value> {
    use serde_json::Value as J;
    Some(match json {
        J::Null => Value::Missing,
        J::Bool(b) => Value::Bool(*b),
        J::Number(n) => {
            if let Some(i) = n.as_i64() {
                Value::Int(i)
            } else if n.is_u64() {
                return None;
            } else {
                Value::Float(n.as_f64()?)
            }
        }
        J::String(s) => Value::Str(s.clone()),
        J::Array(items) => Value::List(items.iter().map(from_json).collect::<Option<_>>()?),
        J::Object(map) => {
            if map.len() != 2 {
                return None;
            }
            let shape = map
                .get("shape")?
                .as_array()?
                .iter()
                .map(|d| d.as_u64().map(|d| d as usize))
                .collect::<Option<Vec<_>>>()?;
            let data = map
                .get("data")?
                .as_array()?
                .iter()
                .map(|x| x.as_f64())
                .collect::<Option<Vec<_>>>()?;
            Value::Tensor(Tensor::new(shape, data).ok()?)
        }
    })
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Missing => f.write_str("missing"),
            Value::Str(s) => write!(f, "{s:?}"),
            other => f.write_str(&csv_cell(other)),
        }
    }
}
