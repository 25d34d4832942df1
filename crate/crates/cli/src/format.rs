//! Number formatting and parsing shared by the commands.

use std::str::FromStr;

use num_bigint::BigInt;
use qetorus::{BigRational, C64};
use serde_json::{Number, Value};

/// Round-trip formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// A JSON number carrying the 17-digit text; non-finite values become null.
pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt17(x)).expect("formatted float is a valid JSON number"))
}

/// [re, im] pair.
pub fn json_complex(z: C64) -> Value {
    Value::Array(vec![json_f64(z.re), json_f64(z.im)])
}

/// An exact integer of any size as a JSON number.
pub fn json_bigint(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer is a valid JSON number"))
}

pub fn json_rational(r: &BigRational) -> (Value, Value) {
    (json_bigint(r.numer()), json_bigint(r.denom()))
}

/// Parse a complex literal such as `0.3`, `-2i`, `i`, `0.25+0.9i`, `1e-3-4.5e-1i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = || format!("cannot parse `{s}` as a complex number");
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |part: &str| -> Result<f64, String> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            p => p.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("-2i").unwrap(), C64::new(0.0, -2.0));
        assert_eq!(parse_complex("0.25+0.9i").unwrap(), C64::new(0.25, 0.9));
        assert_eq!(parse_complex("0.3-i").unwrap(), C64::new(0.3, -1.0));
        assert_eq!(parse_complex("1e-3-4.5e-1i").unwrap(), C64::new(1e-3, -0.45));
        assert_eq!(parse_complex("-1e+2+2E-1i").unwrap(), C64::new(-100.0, 0.2));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(json_f64(f64::NAN), Value::Null);
        assert_eq!(json_f64(0.5).to_string(), "5.0000000000000000e-1");
    }
}
