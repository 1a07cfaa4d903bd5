//! Exact rational scalars and the handful of helpers the rest of the crate
//! needs on top of [`num_rational::BigRational`].
//!
//! Values are always kept reduced with a positive denominator; that is an
//! invariant of `BigRational` itself, which is why the alias is enough.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"num/den"` or `"num"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::BadRational(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Formats as `"num/den"`, omitting the denominator when it is 1.
pub fn format(q: &Rational) -> String {
    q.to_string()
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division when numerator or denominator
        // overflow f64 on their own.
        let n = q.numer().bits() as i64;
        let d = q.denom().bits() as i64;
        let shift = (n.max(d) - 1000).max(0) as usize;
        let nn = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let dd = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        nn / dd
    })
}

/// Exact conversion of a finite `f64`.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

/// Rounds `x` to the nearest fraction with denominator `den`.
pub fn round_to_den(x: f64, den: i64) -> Rational {
    rat((x * den as f64).round() as i64, den)
}

pub fn sign(q: &Rational) -> i8 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Compares `x` against `base^exp` exactly, for `x >= 0`, `base >= 1`.
pub fn cmp_pow(x: &Rational, base: u64, exp: &Rational) -> Ordering {
    debug_assert!(!x.is_negative());
    debug_assert!(base >= 1);
    let p = exp.numer().clone();
    let q = exp.denom().to_u32().expect("exponent denominator fits u32");
    let base = BigInt::from(base);
    let lhs: Rational = Pow::pow(x, q);
    let abs_p = p.abs().to_u32().expect("exponent numerator fits u32");
    let bp = Rational::from_integer(Pow::pow(&base, abs_p));
    if p.is_negative() {
        (lhs * bp).cmp(&Rational::one())
    } else {
        lhs.cmp(&bp)
    }
}

/// Smallest integer `n >= 0` with `n >= base^exp`.
pub fn ceil_pow(base: u64, exp: &Rational) -> u64 {
    let approx = (base as f64).powf(to_f64(exp)).ceil().max(0.0) as u64;
    let mut n = approx.saturating_sub(2);
    while cmp_pow(&Rational::from_integer(BigInt::from(n)), base, exp) == Ordering::Less {
        n += 1;
    }
    while n > 0
        && cmp_pow(&Rational::from_integer(BigInt::from(n - 1)), base, exp) != Ordering::Less
    {
        n -= 1;
    }
    n
}

pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn ceil(q: &Rational) -> BigInt {
    q.numer().div_ceil(q.denom())
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn is_zero(q: &Rational) -> bool {
    q.is_zero()
}

/// Serde adapter storing a rational as its `"num/den"` string.
pub mod serde_str {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(D::Error::custom)
    }
}
