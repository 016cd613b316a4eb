//! JSON report helpers. Every float is snapped to a 1e-12 grid so reports are
//! byte-identical across runs.

use kosmann_core::{Mat, SpinorValue};
use serde_json::{json, Value};

const GRID: f64 = 1e12;

/// Snaps to the 1e-12 grid; `-0` becomes `0`, non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let snapped = if x.abs() < 1e3 { (x * GRID).round() / GRID } else { x };
    let snapped = if snapped == 0.0 { 0.0 } else { snapped };
    json!(snapped)
}

pub fn vector(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&v| num(v)).collect())
}

/// Row-major nested arrays.
pub fn matrix(m: &Mat) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| num(m[(i, j)])).collect())).collect())
}

/// `[[re, im], ...]`.
pub fn spinor(v: &SpinorValue) -> Value {
    Value::Array(v.iter().map(|z| json!([num(z.re), num(z.im)])).collect())
}

/// Pretty-printed report followed by a newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports are plain JSON");
    s.push('\n');
    s
}
