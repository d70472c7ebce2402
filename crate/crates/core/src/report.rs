//! Deterministic structured output.
//!
//! All floating-point values are rounded to 12 significant digits before
//! serialisation so that reports are byte-identical across runs.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(x)
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float rounded to [`SIGNIFICANT_DIGITS`].
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = normalize(serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&v)?)
}

/// Fixed-precision text rendering of a float.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        let r = round_sig(x);
        if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e12) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_stable() {
        assert_eq!(round_sig(std::f64::consts::PI), 3.14159265359);
        assert_eq!(round_sig(round_sig(1.0 / 3.0)), round_sig(1.0 / 3.0));
        let s = to_json(&vec![0.1 + 0.2, 1e-20, f64::INFINITY]).unwrap();
        assert!(s.contains("0.3"));
        assert!(s.contains("null"));
    }
}
