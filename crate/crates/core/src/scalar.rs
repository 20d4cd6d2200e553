//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! The library is written once against [`Scalar`] and instantiated for exact
//! rationals ([`Rational`]) and for `f64`. Exact instantiations compare with
//! zero slack; floating instantiations use a small relative slack.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// True when arithmetic in this type is exact.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn from_f64(x: f64) -> Self;
    fn as_f64(&self) -> f64;

    /// `|self|^p` for a rational exponent `p > 0`. The flag is true when the
    /// returned value is exact.
    fn abs_pow(&self, p: &Rational) -> (Self, bool);

    /// Relative slack used by [`approx_le`] and [`approx_eq`].
    fn slack() -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(Rational::zero)
    }

    fn as_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn abs_pow(&self, p: &Rational) -> (Self, bool) {
        let base = self.abs();
        if base.is_zero() {
            return (base, true);
        }
        if p.is_integer() {
            let e = p.to_integer();
            if let Some(e) = e.to_u32() {
                return (num_traits::pow(base, e as usize), true);
            }
        }
        let (a, b) = (p.numer(), p.denom());
        if let (Some(a), Some(b)) = (a.to_u32(), b.to_u32()) {
            let rn = base.numer().nth_root(b);
            let rd = base.denom().nth_root(b);
            if num_traits::pow(rn.clone(), b as usize) == *base.numer()
                && num_traits::pow(rd.clone(), b as usize) == *base.denom()
            {
                let root = Rational::new(rn, rd);
                return (num_traits::pow(root, a as usize), true);
            }
        }
        let approx = rational_to_f64(&base).powf(rational_to_f64(p));
        (Self::from_f64(approx), false)
    }

    fn slack() -> f64 {
        0.0
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_rational(&self) -> Rational {
        BigRational::from_float(*self).unwrap_or_else(Rational::zero)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn abs_pow(&self, p: &Rational) -> (Self, bool) {
        (self.abs().powf(rational_to_f64(p)), false)
    }

    fn slack() -> f64 {
        1e-9
    }
}

/// `a <= b` up to the scalar type's slack.
pub fn approx_le<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        return a <= b;
    }
    let (x, y) = (a.as_f64(), b.as_f64());
    x <= y + S::slack() * (1.0 + x.abs().max(y.abs()))
}

pub fn approx_eq<S: Scalar>(a: &S, b: &S) -> bool {
    approx_le(a, b) && approx_le(b, a)
}

pub fn max_of<S: Scalar>(values: impl IntoIterator<Item = S>) -> Option<S> {
    values
        .into_iter()
        .fold(None, |acc: Option<S>, v| match acc {
            Some(a) if a >= v => Some(a),
            _ => Some(v),
        })
}

pub fn min_of<S: Scalar>(values: impl IntoIterator<Item = S>) -> Option<S> {
    values
        .into_iter()
        .fold(None, |acc: Option<S>, v| match acc {
            Some(a) if a <= v => Some(a),
            _ => Some(v),
        })
}

/// Conversion that stays finite for huge numerators and denominators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let ln = ln_bigint(r.numer().magnitude()) - ln_bigint(r.denom().magnitude());
    let v = ln.exp();
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// Natural log of a positive big integer, accurate to f64 precision.
pub fn ln_bigint(n: &num_bigint::BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.125"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational literal: {text:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::new(int_part.abs() * &scale + frac_part, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Exact text form: `"p/q"` or `"p"`.
pub fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with `digits` fractional digits, rounded half away from zero.
pub fn decimal(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = rem * 2;
    let q = if twice >= *scaled.denom() { q + 1 } else { q };
    let (int, frac) = q.div_rem(&scale);
    let sign = if r.is_negative() && !(int.is_zero() && frac.is_zero()) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    let frac = frac.to_string();
    format!("{sign}{int}.{}{frac}", "0".repeat(digits - frac.len()))
}

/// Exact rendering of any scalar (floats render through their dyadic value).
pub fn render<S: Scalar>(x: &S) -> String {
    if S::EXACT {
        render_rational(&x.to_rational())
    } else {
        format!("{}", x.as_f64())
    }
}

pub fn render_decimal<S: Scalar>(x: &S) -> String {
    if S::EXACT {
        decimal(&x.to_rational(), 12)
    } else {
        format!("{:.12}", x.as_f64())
    }
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
