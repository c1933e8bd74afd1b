//! Small helpers for exact rationals: construction, logarithms, and the
//! `"num/den"` text form used in every output file.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn big_ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn from_biguint(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n))
}

/// `base^exp` for any integer exponent; `base` must be nonzero when `exp < 0`.
pub fn rpow(base: &BigRational, exp: i64) -> BigRational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

/// Natural log of a positive big integer without overflowing `f64`.
pub fn ln_bigint(x: &BigInt) -> f64 {
    debug_assert!(x.is_positive());
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a rational: `-inf` at zero, NaN for negatives.
pub fn ln_rational(x: &BigRational) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else if x.is_negative() {
        f64::NAN
    } else {
        ln_bigint(x.numer()) - ln_bigint(x.denom())
    }
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // huge numerator or denominator; go through logs
        let sign = if x.is_negative() { -1.0 } else { 1.0 };
        sign * ln_rational(&x.abs()).exp()
    })
}

/// Renders `num/den`, including integers (`"1/1"`).
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn is_one(x: &BigRational) -> bool {
    x.is_one()
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let x = big_ratio(6, 16);
        assert_eq!(format_rational(&x), "3/8");
        assert_eq!(parse_rational("3/8"), Some(x));
        assert_eq!(format_rational(&big_int(1)), "1/1");
        assert_eq!(parse_rational("5"), Some(big_int(5)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("a/2"), None);
    }

    #[test]
    fn logs_of_huge_values() {
        let big = BigInt::from(3u32).pow(2000);
        let expected = 2000.0 * 3f64.ln();
        assert!((ln_bigint(&big) - expected).abs() < 1e-9 * expected);
        let r = BigRational::new(BigInt::one(), big);
        assert!((ln_rational(&r) + expected).abs() < 1e-9 * expected);
        assert_eq!(ln_rational(&BigRational::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn negative_powers() {
        assert_eq!(rpow(&big_int(2), -3), big_ratio(1, 8));
        assert_eq!(rpow(&big_ratio(2, 3), 2), big_ratio(4, 9));
        assert_eq!(rpow(&big_int(7), 0), big_int(1));
    }
}
