use std::str::FromStr;

use serde_json::{Number, Value};

const MIN_SIGNIFICANT: i32 = 7;

/// Fixed-point text with at least seven significant digits (nine decimals
/// for magnitudes of one and above).
pub fn fixed(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.000000000".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (MIN_SIGNIFICANT - 1 - magnitude).max(9) as usize;
    format!("{x:.decimals$}")
}

/// JSON number carrying the `fixed` text verbatim; `null` when not finite.
pub fn json_number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fixed(x)).expect("fixed output is a valid JSON number"))
}
