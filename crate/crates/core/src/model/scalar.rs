//! Numeric backends for shares.
//!
//! Combinatorial rules produce exact rationals ([`Q`]); the Nash rule produces
//! floats. Everything that consumes a distribution is generic over [`Scalar`],
//! and every comparison goes through [`Scalar::cmp_tol`] so that the float
//! backend honours a tolerance while the exact backend ignores it.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational backend.
pub type Q = BigRational;

/// Default tolerance for float comparisons in audits and rankings.
pub const DEFAULT_TOL: f64 = 1e-7;

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Signed
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + 'static
{
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_usize(v: usize) -> Self {
        Self::from_ratio(v as i64, 1)
    }

    fn from_q(q: &Q) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact value, or the simplest rational within `tol` on the float backend.
    fn to_q(&self, tol: f64) -> Q;

    /// Exact comparison for rationals; for floats values within `tol` compare equal.
    fn cmp_tol(&self, other: &Self, tol: f64) -> Ordering;

    /// Canonical rendering: reduced `num/den` or fixed-precision decimal.
    fn render(&self) -> String;

    fn to_json(&self) -> serde_json::Value;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.cmp_tol(other, tol) == Ordering::Equal
    }
}

impl Scalar for Q {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Q::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_q(q: &Q) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_q(&self, _tol: f64) -> Q {
        self.clone()
    }

    fn cmp_tol(&self, other: &Self, _tol: f64) -> Ordering {
        self.cmp(other)
    }

    fn render(&self) -> String {
        render_q(self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(render_q(self))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_q(q: &Q) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_q(&self, tol: f64) -> Q {
        snap_to_q(*self, tol)
    }

    fn cmp_tol(&self, other: &Self, tol: f64) -> Ordering {
        if (self - other).abs() <= tol {
            Ordering::Equal
        } else if self < other {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    fn render(&self) -> String {
        render_f64(*self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

pub fn q(num: i64, den: i64) -> Q {
    Q::from_ratio(num, den)
}

pub fn render_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn render_f64(v: f64) -> String {
    let s = format!("{v:.10}");
    // avoid "-0.0000000000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.0000000000".to_string()
    } else {
        s
    }
}

/// Parses `num/den`, an integer, or a finite decimal literal into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::model(format!("cannot parse `{s}` as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::model(format!("zero denominator in `{s}`")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac}");
        let numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let denom = num_traits::pow(BigInt::from(10u32), frac.len());
        let v = Q::new(numer, denom);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Best rational approximation of `x` with error at most `tol` (continued fractions).
pub fn snap_to_q(x: f64, tol: f64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let neg = x < 0.0;
    let target = x.abs();
    // convergents h/k
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = target;
    for _ in 0..64 {
        let a = rest.floor();
        let a_big = BigInt::from_f64(a).unwrap_or_else(BigInt::zero);
        let h2 = &a_big * &h1 + &h0;
        let k2 = &a_big * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let approx = Q::new(h1.clone(), k1.clone());
        if (ToPrimitive::to_f64(&approx).unwrap_or(f64::NAN) - target).abs() <= tol {
            return if neg { -approx } else { approx };
        }
        let frac = rest - a;
        if frac <= f64::EPSILON {
            break;
        }
        rest = 1.0 / frac;
    }
    let approx = Q::new(h1, k1);
    if neg {
        -approx
    } else {
        approx
    }
}

/// Sum of a slice of scalars.
pub fn sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v)
}

pub fn is_nonnegative<T: Scalar>(v: &T, tol: f64) -> bool {
    v.cmp_tol(&T::zero(), tol) != Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("8/12").unwrap(), q(2, 3));
        assert_eq!(parse_q("3").unwrap(), q(3, 1));
        assert_eq!(parse_q("0.6").unwrap(), q(3, 5));
        assert_eq!(parse_q("-.25").unwrap(), q(-1, 4));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn render_reduced() {
        assert_eq!(q(8, 12).render(), "2/3");
        assert_eq!(q(0, 5).render(), "0");
        assert_eq!(q(4, 4).render(), "1");
        assert_eq!(0.6f64.render(), "0.6000000000");
        assert_eq!((-1e-14f64).render(), "0.0000000000");
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_to_q(0.6, 1e-9), q(3, 5));
        assert_eq!(snap_to_q(1.0 / 3.0, 1e-9), q(1, 3));
        let s = snap_to_q(std::f64::consts::PI, 1e-9);
        assert!((Scalar::to_f64(&s) - std::f64::consts::PI).abs() <= 1e-9);
    }

    #[test]
    fn float_tolerance() {
        assert_eq!(1.0f64.cmp_tol(&(1.0 + 1e-9), 1e-7), Ordering::Equal);
        assert_eq!(1.0f64.cmp_tol(&1.1, 1e-7), Ordering::Less);
        assert_eq!(q(1, 3).cmp_tol(&q(1, 3), 0.5), Ordering::Equal);
        assert_eq!(q(1, 3).cmp_tol(&q(1, 2), 0.5), Ordering::Less);
    }
}
