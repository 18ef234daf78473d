//! Switching float reports between decimal numbers and exact `"a/b"` strings.
//!
//! Every finite `f64` is a dyadic rational, so the rewrite is lossless both
//! ways. Integers are left alone.

use serde_json::{Number, Value};

use crate::scalar::{format_rational, parse_rational, rational_from_f64, Coord};

/// Replaces every non-integer JSON number with its exact `"a/b"` form.
pub fn rationalize(value: Value) -> Value {
    match value {
        Value::Number(x) if x.is_f64() => {
            let r = x.as_f64().and_then(rational_from_f64).expect("JSON numbers are finite");
            Value::String(format_rational(&r))
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(rationalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, rationalize(v))).collect()),
        other => other,
    }
}

/// Inverse of [`rationalize`]: strings of the form `"a/b"` become numbers.
pub fn derationalize(value: Value) -> Value {
    match value {
        Value::String(s) if is_ratio(&s) => match parse_rational(&s).ok().and_then(|r| Number::from_f64(r.to_f64())) {
            Some(x) => Value::Number(x),
            None => Value::String(s),
        },
        Value::Array(xs) => Value::Array(xs.into_iter().map(derationalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, derationalize(v))).collect()),
        other => other,
    }
}

fn is_ratio(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    match body.split_once('/') {
        Some((a, b)) => {
            !a.is_empty() && !b.is_empty() && a.bytes().all(|c| c.is_ascii_digit()) && b.bytes().all(|c| c.is_ascii_digit())
        }
        None => false,
    }
}
