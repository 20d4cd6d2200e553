//! Deterministic amplitude sequences `a_n` with decidable limits and
//! decidable summability of `|a_n|^s`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{int, ln_bigint, ratio, rational_to_f64, render_rational, Rational, Scalar};

/// Family names accepted by the scenario format.
pub const FAMILIES: [&str; 6] = [
    "power",
    "geometric",
    "logpow",
    "constant",
    "growth",
    "alternating",
];

/// Exact evaluation stops here for geometric rates; larger indices are
/// approximated.
const GEOMETRIC_EXACT_MAX: u64 = 2048;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RateSequence {
    /// `n^(-p)`, `p > 0`.
    Power { p: Rational },
    /// `r^n`, `0 < r < 1`.
    Geometric { r: Rational },
    /// `ln(n+1)^(-q)`, `q > 0`.
    LogPow { q: Rational },
    /// `c` for every `n`.
    Constant { c: Rational },
    /// `n^p`, `p > 0`; unbounded.
    Growth { p: Rational },
    /// `(-1)^n * base_n`; the base may not itself alternate.
    Alternating { base: Box<RateSequence> },
}

/// Limit behaviour of a rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RateLimit {
    Zero,
    Constant(Rational),
    /// Alternates between `+c` and `-c` asymptotically (`c != 0`).
    Oscillating(Rational),
    Divergent,
}

/// Value of a rate at an index: a rational approximation and an absolute
/// error bound. The value is exact iff `err == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateValue {
    pub approx: Rational,
    pub err: f64,
}

impl RateValue {
    fn exact(v: Rational) -> Self {
        RateValue { approx: v, err: 0.0 }
    }

    fn approximate(v: f64, log_magnitude: f64) -> Self {
        // exp/ln each lose ~1ulp; the exponent's absolute error scales with
        // its magnitude.
        let rel = 1e-14 * (1.0 + log_magnitude.abs());
        let err = if v == 0.0 {
            f64::MIN_POSITIVE
        } else {
            v.abs() * rel + f64::MIN_POSITIVE
        };
        RateValue {
            approx: Rational::from_f64(v),
            err,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.err == 0.0
    }

    /// Certified upper bound on the absolute value.
    pub fn abs_upper(&self) -> f64 {
        (rational_to_f64(&self.approx.abs()) + self.err) * (1.0 + 1e-15)
    }
}

/// Decay speed of a vanishing rate. Ordered from slowest to fastest decay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecayKey {
    LogPow(Rational),
    Power(Rational),
    Geometric(Rational),
}

impl DecayKey {
    fn rank(&self) -> u8 {
        match self {
            DecayKey::LogPow(_) => 0,
            DecayKey::Power(_) => 1,
            DecayKey::Geometric(_) => 2,
        }
    }

    pub fn rate(&self) -> RateSequence {
        match self {
            DecayKey::LogPow(q) => RateSequence::LogPow { q: q.clone() },
            DecayKey::Power(p) => RateSequence::Power { p: p.clone() },
            DecayKey::Geometric(r) => RateSequence::Geometric { r: r.clone() },
        }
    }
}

impl Ord for DecayKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DecayKey::LogPow(a), DecayKey::LogPow(b)) => a.cmp(b),
            (DecayKey::Power(a), DecayKey::Power(b)) => a.cmp(b),
            // Larger ratio decays more slowly.
            (DecayKey::Geometric(a), DecayKey::Geometric(b)) => b.cmp(a),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for DecayKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl RateSequence {
    pub fn power(p: Rational) -> Result<Self> {
        let r = RateSequence::Power { p };
        r.validate()?;
        Ok(r)
    }

    pub fn geometric(r: Rational) -> Result<Self> {
        let g = RateSequence::Geometric { r };
        g.validate()?;
        Ok(g)
    }

    pub fn logpow(q: Rational) -> Result<Self> {
        let r = RateSequence::LogPow { q };
        r.validate()?;
        Ok(r)
    }

    pub fn constant(c: Rational) -> Self {
        RateSequence::Constant { c }
    }

    pub fn growth(p: Rational) -> Result<Self> {
        let r = RateSequence::Growth { p };
        r.validate()?;
        Ok(r)
    }

    pub fn alternating(base: RateSequence) -> Result<Self> {
        let r = RateSequence::Alternating {
            base: Box::new(base),
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            RateSequence::Power { p } | RateSequence::Growth { p } if !p.is_positive() => {
                bad(format!("{} exponent must be > 0, got {}", self.family(), render_rational(p)))
            }
            RateSequence::LogPow { q } if !q.is_positive() => {
                bad(format!("logpow exponent must be > 0, got {}", render_rational(q)))
            }
            RateSequence::Geometric { r } if !(r.is_positive() && *r < Rational::one()) => {
                bad(format!("geometric ratio must lie in (0, 1), got {}", render_rational(r)))
            }
            RateSequence::Alternating { base } => match **base {
                RateSequence::Alternating { .. } => bad("nested alternating rates".into()),
                ref b => b.validate(),
            },
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            RateSequence::Power { .. } => "power",
            RateSequence::Geometric { .. } => "geometric",
            RateSequence::LogPow { .. } => "logpow",
            RateSequence::Constant { .. } => "constant",
            RateSequence::Growth { .. } => "growth",
            RateSequence::Alternating { .. } => "alternating",
        }
    }

    pub fn is_alternating(&self) -> bool {
        matches!(self, RateSequence::Alternating { .. })
    }

    /// The rate with any alternating wrapper removed.
    pub fn base(&self) -> &RateSequence {
        match self {
            RateSequence::Alternating { base } => base,
            other => other,
        }
    }

    pub fn limit(&self) -> RateLimit {
        match self {
            RateSequence::Power { .. }
            | RateSequence::Geometric { .. }
            | RateSequence::LogPow { .. } => RateLimit::Zero,
            RateSequence::Constant { c } if c.is_zero() => RateLimit::Zero,
            RateSequence::Constant { c } => RateLimit::Constant(c.clone()),
            RateSequence::Growth { .. } => RateLimit::Divergent,
            RateSequence::Alternating { base } => match base.limit() {
                RateLimit::Zero => RateLimit::Zero,
                RateLimit::Constant(c) => RateLimit::Oscillating(c),
                other => other,
            },
        }
    }

    /// Decay class when the rate tends to zero without being identically zero.
    pub fn decay_key(&self) -> Option<DecayKey> {
        match self.base() {
            RateSequence::Power { p } => Some(DecayKey::Power(p.clone())),
            RateSequence::Geometric { r } => Some(DecayKey::Geometric(r.clone())),
            RateSequence::LogPow { q } => Some(DecayKey::LogPow(q.clone())),
            _ => None,
        }
    }

    /// Rational upper bound on `sup_n |a_n|`; `None` when unbounded.
    pub fn sup_abs(&self) -> Option<Rational> {
        match self.base() {
            RateSequence::Power { .. } => Some(Rational::one()),
            RateSequence::Geometric { r } => Some(r.clone()),
            // 1/ln 2 < 13/9, and the bound only grows with the exponent.
            RateSequence::LogPow { q } => {
                let e = q.ceil().to_integer().to_usize().unwrap_or(usize::MAX);
                Some(num_traits::pow(ratio(13, 9), e))
            }
            RateSequence::Constant { c } => Some(c.abs()),
            RateSequence::Growth { .. } => None,
            RateSequence::Alternating { .. } => unreachable!("validated"),
        }
    }

    pub fn value_at(&self, n: u64) -> RateValue {
        self.value_at_big(&BigUint::from(n))
    }

    pub fn value_at_big(&self, n: &BigUint) -> RateValue {
        debug_assert!(!n.is_zero());
        match self {
            RateSequence::Alternating { base } => {
                let v = base.value_at_big(n);
                if n.bit(0) {
                    RateValue {
                        approx: -v.approx,
                        err: v.err,
                    }
                } else {
                    v
                }
            }
            RateSequence::Constant { c } => RateValue::exact(c.clone()),
            RateSequence::Power { p } => match exact_power(n, p) {
                Some(v) => RateValue::exact(v.recip()),
                None => {
                    let e = -rational_to_f64(p) * ln_bigint(n);
                    RateValue::approximate(e.exp(), e)
                }
            },
            RateSequence::Growth { p } => match exact_power(n, p) {
                Some(v) => RateValue::exact(v),
                None => {
                    let e = rational_to_f64(p) * ln_bigint(n);
                    RateValue::approximate(e.exp(), e)
                }
            },
            RateSequence::Geometric { r } => match n.to_u64() {
                Some(k) if k <= GEOMETRIC_EXACT_MAX => {
                    RateValue::exact(num_traits::pow(r.clone(), k as usize))
                }
                _ => {
                    let nf = n.to_f64().unwrap_or(f64::INFINITY);
                    let e = nf * rational_to_f64(r).ln();
                    RateValue::approximate(e.exp(), if e.is_finite() { e } else { 0.0 })
                }
            },
            RateSequence::LogPow { q } => {
                let l = ln_bigint(&(n + 1u32));
                let e = -rational_to_f64(q) * l.ln();
                RateValue::approximate(e.exp(), e)
            }
        }
    }

    /// Upper bound on `|a_n|` for every `n >= 2^k`, computed without forming
    /// `2^k`. Only meaningful for vanishing or constant rates.
    pub(crate) fn abs_upper_from_log2(&self, k: u64) -> f64 {
        let ln_n = k as f64 * std::f64::consts::LN_2;
        let slack = 1.0 + 1e-12;
        match self.base() {
            RateSequence::Power { p } => (-rational_to_f64(p) * ln_n).exp() * slack,
            RateSequence::LogPow { q } => {
                if k == 0 {
                    // n = 1: ln 2 < ln(n + 1) for every n >= 1.
                    std::f64::consts::LN_2.powf(-rational_to_f64(q)) * slack
                } else {
                    ln_n.powf(-rational_to_f64(q)) * slack
                }
            }
            RateSequence::Geometric { r } => {
                let n = 2f64.powi(k.min(2000) as i32);
                (n * rational_to_f64(r).ln()).exp() * slack + f64::MIN_POSITIVE
            }
            RateSequence::Constant { c } => rational_to_f64(&c.abs()) * slack,
            RateSequence::Growth { .. } => f64::INFINITY,
            RateSequence::Alternating { .. } => unreachable!("validated"),
        }
    }
}

impl fmt::Display for RateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateSequence::Power { p } => write!(f, "n^-({})", render_rational(p)),
            RateSequence::Geometric { r } => write!(f, "({})^n", render_rational(r)),
            RateSequence::LogPow { q } => write!(f, "ln(n+1)^-({})", render_rational(q)),
            RateSequence::Constant { c } => write!(f, "{}", render_rational(c)),
            RateSequence::Growth { p } => write!(f, "n^({})", render_rational(p)),
            RateSequence::Alternating { base } => write!(f, "(-1)^n*{base}"),
        }
    }
}

/// Results wider than this are left to the float path.
const EXACT_POWER_BITS: u64 = 4096;

/// `n^p` exactly, when it is rational and not too wide.
fn exact_power(n: &BigUint, p: &Rational) -> Option<Rational> {
    let a = p.numer().to_u32()?;
    let b = p.denom().to_u32()?;
    if n.bits() * u64::from(a) > EXACT_POWER_BITS * u64::from(b) {
        return None;
    }
    let root = n.nth_root(b);
    if num_traits::pow(root.clone(), b as usize) != *n {
        return None;
    }
    let v = num_traits::pow(root, a as usize);
    Some(Rational::from_integer(v.into()))
}

/// Whether `sum_n |a_n|^s` converges, for rational `s > 0`.
pub fn series_converges(rate: &RateSequence, s: &Rational) -> Result<bool> {
    if !s.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "series exponent must be > 0, got {}",
            render_rational(s)
        )));
    }
    Ok(match rate.base() {
        RateSequence::Power { p } => p * s > int(1),
        RateSequence::Geometric { .. } => true,
        RateSequence::LogPow { .. } => false,
        RateSequence::Constant { c } => c.is_zero(),
        RateSequence::Growth { .. } => false,
        RateSequence::Alternating { .. } => unreachable!("validated"),
    })
}
