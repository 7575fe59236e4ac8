//! Text forms for numbers in configs and emitted tables.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Parse `"3"`, `"-2/7"` or a plain decimal such as `"0.125"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).ok()?
        };
        let scale = BigInt::from(10u8).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).ok()?;
        let signed_frac = if negative { -frac_part } else { frac_part };
        return Some(BigRational::new(int_part * &scale + signed_frac, scale));
    }
    BigInt::from_str(s).ok().map(BigRational::from_integer)
}

/// `num/den`, always with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".into();
    }
    format!("{x:.16e}")
}

/// Serde adapter storing a [`BigRational`] as a string.
pub mod rational_string {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        if r.denom().is_one() {
            s.serialize_str(&r.numer().to_string())
        } else {
            s.serialize_str(&format_rational(r))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse_rational(&t).ok_or_else(|| de::Error::custom(format!("not a rational: {t:?}"))),
            Raw::Int(i) => Ok(BigRational::from_integer(i.into())),
            Raw::Float(x) => BigRational::from_float(x).ok_or_else(|| de::Error::custom("non-finite number")),
        }
    }
}

/// Serde adapter for a list of rationals stored as strings.
pub mod rational_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::rational_string")] BigRational);

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let wrapped: Vec<Wrap> = v.iter().cloned().map(Wrap).collect();
        wrapped.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

/// Serde adapter for an optional rational stored as a string or `null`.
pub mod rational_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::rational_string")] BigRational);

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        v.clone().map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// Serde adapter for an optional `(rational, position)` pair.
pub mod rational_at_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::rational_string")] BigRational, u64);

    pub fn serialize<S: Serializer>(v: &Option<(BigRational, u64)>, s: S) -> Result<S::Ok, S::Error> {
        v.clone().map(|(r, n)| Wrap(r, n)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<(BigRational, u64)>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| (w.0, w.1)))
    }
}

/// Serde adapter storing a [`BigInt`] as a decimal string; plain JSON
/// integers are accepted on input.
pub mod bigint_string {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => BigInt::from_str(t.trim()).map_err(|_| de::Error::custom(format!("not an integer: {t:?}"))),
            Raw::Int(i) => Ok(i.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses() {
        assert_eq!(parse_rational("3"), Some(r(3, 1)));
        assert_eq!(parse_rational(" -2/7 "), Some(r(-2, 7)));
        assert_eq!(parse_rational("0.125"), Some(r(1, 8)));
        assert_eq!(parse_rational("-1.5"), Some(r(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn formats() {
        assert_eq!(format_rational(&r(6, 1)), "6/1");
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
