//! Number formatting for machine-readable output.

/// Formats `x` with nine significant digits, trimming trailing zeros.
///
/// Moderate magnitudes use positional notation, everything else falls back
/// to scientific notation so that the digit count stays fixed.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding can carry into a new digit (9.99999999e-1 -> 1.00000000)
        trim(&s)
    } else {
        let s = format!("{x:.8e}");
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        format!("{}e{}", trim(mant), e)
    }
}

/// Rounds every float in a JSON tree to nine significant digits.
pub fn round_json(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            sig9(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, x)| (k, round_json(x))).collect()),
        other => other,
    }
}

/// Pretty JSON with floats at nine significant digits.
pub fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    Ok(serde_json::to_string_pretty(&round_json(serde_json::to_value(value)?))? + "\n")
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".to_string()
        } else {
            t.to_string()
        }
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    fn nine_digits() {
        assert_eq!(sig9(0.0392219345), "0.0392219345");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(-2.5e-9), "-2.5e-9");
        assert_eq!(sig9(1234567891.0), "1.23456789e9");
        assert_eq!(sig9(std::f64::consts::PI), "3.14159265");
    }

    #[test]
    fn json_rounding() {
        let v = serde_json::json!({"x": [1.0f64 / 3.0, 2], "y": "s"});
        assert_eq!(super::round_json(v).to_string(), r#"{"x":[0.333333333,2],"y":"s"}"#);
    }
}
