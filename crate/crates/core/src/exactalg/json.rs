//! JSON forms of the exact types.
//!
//! * `Rational`: the string `"p/q"` in lowest terms with `q > 0`.
//! * `Poly`: array of coefficient strings, index = power of `z`.
//! * `RatFunc`: `{"num": [...], "den": [...]}`.
//! * `ExpPoly`: `{"rate": "p/q", "poly": [...]}`.
//!
//! Parsing also accepts bare integers (`"3"`, `3`) and finite decimals.

use rug::{Integer, Rational};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ExpPoly, Poly, RatFunc};
use crate::error::{Error, Result};

pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: Integer = n.trim().parse().map_err(|_| bad())?;
        let d: Integer = d.trim().parse().map_err(|_| bad())?;
        if d.cmp0().is_eq() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::from((n, d)));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int_part: Integer = match int.trim() {
            "" | "-" | "+" => Integer::new(),
            t => t.parse().map_err(|_| bad())?,
        };
        let frac_part: Integer = if frac.is_empty() {
            Integer::new()
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let scale = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        let mut r = Rational::from((frac_part, scale));
        if neg {
            r = -r;
        }
        return Ok(r + int_part);
    }
    let n: Integer = s.parse().map_err(|_| bad())?;
    Ok(Rational::from(n))
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from(n.as_i64().unwrap())),
        other => Err(Error::Parse(format!("expected rational string, got {other}"))),
    }
}

pub fn poly_from_json(v: &Value) -> Result<Poly> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected coefficient array, got {v}")))?;
    Ok(Poly::new(
        arr.iter().map(rational_from_json).collect::<Result<Vec<_>>>()?,
    ))
}

pub fn ratfunc_from_json(v: &Value) -> Result<RatFunc> {
    let num = v
        .get("num")
        .ok_or_else(|| Error::Parse("RatFunc: missing field \"num\"".into()))?;
    let den = v
        .get("den")
        .ok_or_else(|| Error::Parse("RatFunc: missing field \"den\"".into()))?;
    RatFunc::new(poly_from_json(num)?, poly_from_json(den)?)
}

pub fn exppoly_from_json(v: &Value) -> Result<ExpPoly> {
    let rate = v
        .get("rate")
        .ok_or_else(|| Error::Parse("ExpPoly: missing field \"rate\"".into()))?;
    let poly = v
        .get("poly")
        .ok_or_else(|| Error::Parse("ExpPoly: missing field \"poly\"".into()))?;
    Ok(ExpPoly::new(rational_from_json(rate)?, poly_from_json(poly)?))
}

/// `#[serde(with = "rational_str")]` for `Rational` fields.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = Value::deserialize(d)?;
        rational_from_json(&v).map_err(de::Error::custom)
    }
}

/// `#[serde(with = "rational_vec")]` for `Vec<Rational>` fields.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(rs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rs.len()))?;
        for r in rs {
            seq.serialize_element(&rational_to_string(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<Value>::deserialize(d)?;
        v.iter()
            .map(rational_from_json)
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_vec::serialize(self.coeffs(), s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Poly::new(rational_vec::deserialize(d)?))
    }
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("num", self.num())?;
        m.serialize_entry("den", self.den())?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        ratfunc_from_json(&v).map_err(de::Error::custom)
    }
}

impl Serialize for ExpPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("rate", &rational_to_string(&self.rate))?;
        m.serialize_entry("poly", &self.poly)?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for ExpPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        exppoly_from_json(&v).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn poly_format() {
        let p = Poly::new(vec![Rational::from((-1, 2)), Rational::new(), Rational::from(3)]);
        assert_eq!(serde_json::to_value(&p).unwrap(), json!(["-1/2", "0/1", "3/1"]));
    }

    #[test]
    fn ratfunc_and_exppoly_format() {
        let f = RatFunc::new(Poly::one(), Poly::z()).unwrap();
        assert_eq!(
            serde_json::to_value(&f).unwrap(),
            json!({"num": ["1/1"], "den": ["0/1", "1/1"]})
        );
        let e = ExpPoly::new(Rational::from(1), Poly::from_ints(&[-1, 1]));
        assert_eq!(
            serde_json::to_value(&e).unwrap(),
            json!({"rate": "1/1", "poly": ["-1/1", "1/1"]})
        );
    }

    #[test]
    fn parses_lenient_forms() {
        assert_eq!(parse_rational("6/4").unwrap(), Rational::from((3, 2)));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational::from((-1, 4)));
        assert_eq!(parse_rational("7").unwrap(), Rational::from(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        let p: Poly = serde_json::from_value(json!(["1", 2, "-3/6"])).unwrap();
        assert_eq!(
            p,
            Poly::new(vec![Rational::from(1), Rational::from(2), Rational::from((-1, 2))])
        );
    }

    #[test]
    fn missing_field_is_reported() {
        let err = ratfunc_from_json(&json!({"num": ["1/1"]})).unwrap_err();
        assert!(err.to_string().contains("den"));
    }

    proptest! {
        #[test]
        fn ratfunc_json_round_trip(
            num in prop::collection::vec((-50i64..50, 1i64..9), 0..6),
            den in prop::collection::vec((-50i64..50, 1i64..9), 1..6),
        ) {
            let mk = |v: &[(i64, i64)]| Poly::new(v.iter().map(|&(a, b)| Rational::from((a, b))).collect());
            let d = mk(&den);
            prop_assume!(!d.is_zero());
            let f = RatFunc::new(mk(&num), d).unwrap();
            let text = serde_json::to_string(&f).unwrap();
            let back: RatFunc = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
