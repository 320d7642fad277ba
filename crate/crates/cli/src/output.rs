//! JSON rendering of target-format values and results.

use rivalkit::eval::{Outcome, Rung};
use rivalkit::search::Rect;
use rivalkit::{RoundDir, TargetFormat};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Shortest decimal that reads back as the same target value.
pub fn decimal(x: f64, target: TargetFormat) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    match target {
        TargetFormat::Binary64 => format!("{x:?}"),
        TargetFormat::Binary32 => format!("{:?}", x as f32),
    }
}

/// C99 hexadecimal float text, exact for every finite value.
pub fn hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x == 0.0 {
        return format!("{sign}0x0p+0");
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let dot = if digits.is_empty() { String::new() } else { format!(".{digits}") };
    format!("{sign}0x{lead}{dot}p{e:+}")
}

pub fn number(x: f64, target: TargetFormat) -> Value {
    json!({ "decimal": decimal(x, target), "hex": hex(x) })
}

pub fn point(vars: &[String], xs: &[f64], target: TargetFormat) -> Value {
    let map: serde_json::Map<String, Value> =
        vars.iter().zip(xs).map(|(v, &x)| (v.clone(), number(x, target))).collect();
    Value::Object(map)
}

pub fn rect(r: &Rect, target: TargetFormat) -> Value {
    Value::Array(
        r.0.iter()
            .map(|&(lo, hi)| json!([decimal(lo, target), decimal(hi, target)]))
            .collect(),
    )
}

pub fn outcome(o: &Outcome, target: TargetFormat) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "outcome": o.label(),
        "bits_used": o.bits(),
    });
    match o {
        Outcome::Valid { value, .. } => {
            v["value"] = json!(decimal(*value, target));
            v["value_hex"] = json!(hex(*value));
        }
        Outcome::Invalid { reason, .. } => v["reason"] = json!(reason.as_str()),
        _ => {}
    }
    v
}

pub fn rungs(trace: &[Rung], target: TargetFormat) -> Value {
    Value::Array(
        trace
            .iter()
            .map(|r| {
                let bound = |x: &rug::Float, dir| decimal(target.round(x, dir), target);
                let interval = if r.output.err.guaranteed {
                    Value::Null
                } else {
                    json!({
                        "lo": bound(&r.output.lo.value, RoundDir::Down),
                        "hi": bound(&r.output.hi.value, RoundDir::Up),
                        "lo_immovable": r.output.lo.immovable,
                        "hi_immovable": r.output.hi.immovable,
                    })
                };
                json!({
                    "bits": r.bits,
                    "interval": interval,
                    "error": r.output.err.label(),
                    "validity": r.validity.to_string(),
                })
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_floats() {
        assert_eq!(hex(1.0), "0x1p+0");
        assert_eq!(hex(-0.75), "-0x1.8p-1");
        assert_eq!(hex(f64::MIN_POSITIVE / 2.0), "0x0.8p-1022");
        assert_eq!(hex(f64::MAX), "0x1.fffffffffffffp+1023");
        assert_eq!(hex(0.0), "0x0p+0");
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal(0.1, TargetFormat::Binary64), "0.1");
        assert_eq!(decimal(0.1f32 as f64, TargetFormat::Binary32), "0.1");
        assert_eq!(decimal(f64::NEG_INFINITY, TargetFormat::Binary64), "-inf");
    }
}
