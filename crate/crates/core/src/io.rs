//! Interchange formats.
//!
//! Matrices are `{rows, cols, entries: [[re, im], ...]}` in row-major order
//! and vectors `{dim, entries}`. Every floating-point number is written with
//! 17 significant digits, which round-trips any `f64` exactly. Correlation
//! CSV files have the header `i,j,k,l,re,im` with 0-based indices.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// `x` as a JSON number with 17 significant digits; non-finite values
/// become `null`.
pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON"))
}

/// Rewrites every non-integer number in `v` with 17 significant digits.
pub fn normalize_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = number(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(normalize_numbers),
        Value::Object(map) => map.values_mut().for_each(normalize_numbers),
        _ => {}
    }
}

/// Serializes `x` to a JSON value with normalized numbers.
pub fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    let mut v = serde_json::to_value(x)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    normalize_numbers(&mut v);
    Ok(v)
}

pub fn to_json_string<T: Serialize>(x: &T) -> Result<String> {
    let v = to_value(x)?;
    let mut s = serde_json::to_string_pretty(&v)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    serde_json::from_str(text).map_err(|e| Error::Shape(format!("bad matrix JSON: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub dim: usize,
    pub entries: Vec<C64>,
}

pub fn vector_to_json(v: &[C64]) -> Result<String> {
    to_json_string(&VectorJson {
        dim: v.len(),
        entries: v.to_vec(),
    })
}

pub fn vector_from_json(text: &str) -> Result<Vec<C64>> {
    let v: VectorJson =
        serde_json::from_str(text).map_err(|e| Error::Shape(format!("bad vector JSON: {e}")))?;
    if v.entries.len() != v.dim {
        return Err(Error::Shape(format!(
            "vector declares dim {} but has {} entries",
            v.dim,
            v.entries.len()
        )));
    }
    if v.entries.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(v.entries)
}

fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per coordinate `s(u_ij ⊗ v_kl)`.
pub fn correlation_csv(x: &CorrelationMatrix) -> String {
    let mut out = String::from("i,j,k,l,re,im\n");
    for i in 0..x.n {
        for j in 0..x.n {
            for k in 0..x.m {
                for l in 0..x.m {
                    let z = x.entry(i, j, k, l);
                    let _ = writeln!(
                        out,
                        "{i},{j},{k},{l},{},{}",
                        csv_number(z.re),
                        csv_number(z.im)
                    );
                }
            }
        }
    }
    out
}
