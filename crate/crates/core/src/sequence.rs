//! Analytic random-variable sequences `X_n = X + sum_k a_n^(k) D_k`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{EventSet, RandomVariable};
use crate::rate::{DecayKey, RateSequence};
use crate::scalar::{Rational, Scalar};

/// Largest binary exponent explored when searching for a capacity index.
const MAX_LOG2_INDEX: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct Term<S> {
    pub rate: RateSequence,
    pub direction: RandomVariable<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec<S> {
    base: RandomVariable<S>,
    terms: Vec<Term<S>>,
    prefix: Vec<RandomVariable<S>>,
    declared_limit: Option<RandomVariable<S>>,
    tabulated_only: bool,
}

/// `X_n` together with a bound on its absolute evaluation error.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated<S> {
    pub value: RandomVariable<S>,
    /// Per-atom absolute error bound; zero when every rate value was exact.
    pub err: f64,
}

impl<S> Evaluated<S> {
    pub fn is_exact(&self) -> bool {
        self.err == 0.0
    }
}

/// Pointwise limit candidate and the atoms where no limit exists.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitInfo<S> {
    pub candidate: RandomVariable<S>,
    pub failing: EventSet,
}

impl<S> LimitInfo<S> {
    pub fn exists(&self) -> bool {
        self.failing.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    pub fn of(n: u64) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Sign of `(-1)^n` on this parity class.
    pub fn sign<S: Scalar>(self) -> S {
        match self {
            Parity::Even => S::one(),
            Parity::Odd => -S::one(),
        }
    }
}

/// Side from which a convergent subsequence approaches its limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Below,
    Exact,
    Above,
}

/// Eventual behaviour of `X_n(w)` along one parity class.
#[derive(Debug, Clone, PartialEq)]
pub enum Germ<S> {
    Finite { value: S, side: Side },
    PosInf,
    NegInf,
}

impl<S: Scalar> Germ<S> {
    pub fn finite_value(&self) -> Option<&S> {
        match self {
            Germ::Finite { value, .. } => Some(value),
            _ => None,
        }
    }

    /// The germ of `X_n(w) - x`.
    pub fn shifted(&self, x: &S) -> Germ<S> {
        match self {
            Germ::Finite { value, side } => Germ::Finite {
                value: value.clone() - x.clone(),
                side: *side,
            },
            other => other.clone(),
        }
    }

    /// Whether `|germ| >= eps` holds for all large `n`.
    pub fn eventually_at_least(&self, eps: &S) -> bool {
        match self {
            Germ::Finite { value, side } => {
                let a = value.abs();
                if a > *eps {
                    return true;
                }
                if a < *eps || a.is_zero() {
                    return false;
                }
                match side {
                    Side::Exact => true,
                    Side::Above => value.is_positive(),
                    Side::Below => value.is_negative(),
                }
            }
            _ => true,
        }
    }
}

/// Per-atom grouping of terms by asymptotic class.
#[derive(Debug, Clone)]
struct Profile<S> {
    offset: S,
    oscillation: S,
    growth: BTreeMap<Rational, (S, S)>,
    decay: BTreeMap<DecayKey, (S, S)>,
}

impl<S: Scalar> Profile<S> {
    fn net(pair: &(S, S), parity: Parity) -> S {
        pair.0.clone() + parity.sign::<S>() * pair.1.clone()
    }

    fn germ(&self, parity: Parity) -> Germ<S> {
        for pair in self.growth.values().rev() {
            let c = Self::net(pair, parity);
            if c.is_positive() {
                return Germ::PosInf;
            }
            if c.is_negative() {
                return Germ::NegInf;
            }
        }
        let value = self.offset.clone() + parity.sign::<S>() * self.oscillation.clone();
        let mut side = Side::Exact;
        for pair in self.decay.values() {
            let c = Self::net(pair, parity);
            if c.is_positive() {
                side = Side::Above;
                break;
            }
            if c.is_negative() {
                side = Side::Below;
                break;
            }
        }
        Germ::Finite { value, side }
    }

    fn has_limit(&self) -> bool {
        self.oscillation.is_zero()
            && self
                .growth
                .values()
                .all(|(a, b)| a.is_zero() && b.is_zero())
    }
}

impl<S: Scalar> SequenceSpec<S> {
    pub fn new(base: RandomVariable<S>) -> Self {
        SequenceSpec {
            base,
            terms: Vec::new(),
            prefix: Vec::new(),
            declared_limit: None,
            tabulated_only: false,
        }
    }

    /// A sequence known only through finitely many values.
    pub fn tabulated(values: Vec<RandomVariable<S>>) -> Result<Self> {
        let first = values
            .first()
            .ok_or_else(|| Error::InvalidParameter("tabulated sequence is empty".into()))?;
        let size = first.len();
        let mut seq = SequenceSpec::new(RandomVariable::constant(size, S::zero()));
        seq = seq.with_prefix(values)?;
        seq.tabulated_only = true;
        Ok(seq)
    }

    pub fn with_term(mut self, rate: RateSequence, direction: RandomVariable<S>) -> Result<Self> {
        rate.validate()?;
        self.check_len(&direction)?;
        self.terms.push(Term { rate, direction });
        Ok(self)
    }

    pub fn with_prefix(mut self, prefix: Vec<RandomVariable<S>>) -> Result<Self> {
        for x in &prefix {
            self.check_len(x)?;
        }
        self.prefix = prefix;
        Ok(self)
    }

    pub fn with_limit(mut self, limit: RandomVariable<S>) -> Result<Self> {
        self.check_len(&limit)?;
        self.declared_limit = Some(limit);
        Ok(self)
    }

    pub fn without_limit(mut self) -> Self {
        self.declared_limit = None;
        self
    }

    fn check_len(&self, x: &RandomVariable<S>) -> Result<()> {
        if x.len() != self.base.len() {
            return Err(Error::DimensionMismatch {
                expected: self.base.len(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &RandomVariable<S> {
        &self.base
    }

    pub fn terms(&self) -> &[Term<S>] {
        &self.terms
    }

    pub fn prefix(&self) -> &[RandomVariable<S>] {
        &self.prefix
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn declared_limit(&self) -> Option<&RandomVariable<S>> {
        self.declared_limit.as_ref()
    }

    pub fn is_tabulated_only(&self) -> bool {
        self.tabulated_only
    }

    pub fn eval_at(&self, n: u64) -> Result<Evaluated<S>> {
        if n == 0 {
            return Err(Error::InvalidParameter("sequence indices start at 1".into()));
        }
        if n <= self.prefix_len() {
            return Ok(Evaluated {
                value: self.prefix[n as usize - 1].clone(),
                err: 0.0,
            });
        }
        self.eval_big(&BigUint::from(n))
    }

    pub fn eval_big(&self, n: &BigUint) -> Result<Evaluated<S>> {
        if n.is_zero() {
            return Err(Error::InvalidParameter("sequence indices start at 1".into()));
        }
        if let Some(k) = n.to_u64() {
            if k <= self.prefix_len() {
                return self.eval_at(k);
            }
        }
        if self.tabulated_only {
            return Err(Error::OutOfRange {
                n: n.to_string(),
                len: self.prefix.len(),
            });
        }
        let mut values = self.base.values().to_vec();
        let mut errs = vec![0.0f64; values.len()];
        for term in &self.terms {
            let a = term.rate.value_at_big(n);
            let coef = S::from_rational(&a.approx);
            for (i, d) in term.direction.values().iter().enumerate() {
                if d.is_zero() {
                    continue;
                }
                values[i] = values[i].clone() + coef.clone() * d.clone();
                errs[i] += a.err * d.abs().as_f64();
            }
        }
        let err = errs.into_iter().fold(0.0, f64::max);
        Ok(Evaluated {
            value: RandomVariable::new(values),
            err: if err > 0.0 { err * (1.0 + 1e-12) } else { 0.0 },
        })
    }

    fn profile(&self, atom: usize) -> Profile<S> {
        let mut p = Profile {
            offset: self.base.get(atom).clone(),
            oscillation: S::zero(),
            growth: BTreeMap::new(),
            decay: BTreeMap::new(),
        };
        for term in &self.terms {
            let d = term.direction.get(atom).clone();
            if d.is_zero() {
                continue;
            }
            let alt = term.rate.is_alternating();
            let slot = |pair: &mut (S, S)| {
                if alt {
                    pair.1 = pair.1.clone() + d.clone();
                } else {
                    pair.0 = pair.0.clone() + d.clone();
                }
            };
            match term.rate.base() {
                RateSequence::Constant { c } => {
                    let v = S::from_rational(c) * d.clone();
                    if alt {
                        p.oscillation = p.oscillation + v;
                    } else {
                        p.offset = p.offset + v;
                    }
                }
                RateSequence::Growth { p: e } => {
                    slot(p.growth.entry(e.clone()).or_insert((S::zero(), S::zero())));
                }
                other => {
                    let key = other.decay_key().expect("decaying family");
                    slot(p.decay.entry(key).or_insert((S::zero(), S::zero())));
                }
            }
        }
        p
    }

    /// Pointwise limit where it exists. Atoms carrying a net oscillating or
    /// growing component are reported in `failing`; the candidate there is
    /// the non-oscillating offset.
    pub fn limit_rv(&self) -> LimitInfo<S> {
        let size = self.size();
        if self.tabulated_only {
            let last = self.prefix.last().cloned().expect("nonempty table");
            return LimitInfo {
                candidate: self.declared_limit.clone().unwrap_or(last),
                failing: EventSet::empty(size),
            };
        }
        let mut failing = EventSet::empty(size);
        let mut values = Vec::with_capacity(size);
        for i in 0..size {
            let p = self.profile(i);
            if !p.has_limit() {
                failing.insert(i);
            }
            values.push(p.offset);
        }
        LimitInfo {
            candidate: RandomVariable::new(values),
            failing,
        }
    }

    /// Declared limit, or the derived candidate.
    pub fn target(&self) -> RandomVariable<S> {
        self.declared_limit
            .clone()
            .unwrap_or_else(|| self.limit_rv().candidate)
    }

    /// Requires a limit to compare against: declared, or derivable everywhere.
    pub fn require_target(&self) -> Result<RandomVariable<S>> {
        if let Some(x) = &self.declared_limit {
            return Ok(x.clone());
        }
        if self.tabulated_only {
            return Err(Error::MissingLimit(
                "tabulated sequence has no declared limit".into(),
            ));
        }
        Ok(self.limit_rv().candidate)
    }

    /// Eventual behaviour of `X_n(atom)` for `n` of the given parity.
    pub fn germ(&self, atom: usize, parity: Parity) -> Germ<S> {
        self.profile(atom).germ(parity)
    }

    pub fn germs(&self, parity: Parity) -> Vec<Germ<S>> {
        (0..self.size()).map(|i| self.germ(i, parity)).collect()
    }

    /// Slowest decaying rate with a nonzero net coefficient on `atom` for the
    /// given parity, with that coefficient.
    pub fn dominant_decay(&self, atom: usize, parity: Parity) -> Option<(RateSequence, S)> {
        self.profile(atom).decay.iter().find_map(|(k, pair)| {
            let c = Profile::net(pair, parity);
            (!c.is_zero()).then(|| (k.rate(), c))
        })
    }

    /// Whether some term grows without bound on this atom.
    pub fn has_growth(&self, atom: usize) -> bool {
        self.terms.iter().any(|t| {
            matches!(t.rate.base(), RateSequence::Growth { .. }) && !t.direction.get(atom).is_zero()
        })
    }

    /// Upper bound on `sum_k |a_n^(k)| |D_k(w)|` over decaying terms, valid
    /// for every index `>= n`.
    pub fn decay_bound_at(&self, atoms: &EventSet, n: &BigUint) -> f64 {
        self.decay_bound_with(atoms, |r| r.value_at_big(n).abs_upper())
    }

    fn decay_bound_log2(&self, atoms: &EventSet, k: u64) -> f64 {
        self.decay_bound_with(atoms, |r| r.abs_upper_from_log2(k))
    }

    fn decay_bound_with(&self, atoms: &EventSet, f: impl Fn(&RateSequence) -> f64) -> f64 {
        let mut worst = 0.0f64;
        for w in atoms.iter() {
            let mut total = 0.0;
            for t in &self.terms {
                let d = t.direction.get(w);
                if d.is_zero() || t.rate.decay_key().is_none() {
                    continue;
                }
                total += f(&t.rate) * d.abs().as_f64();
            }
            worst = worst.max(total * (1.0 + 1e-12));
        }
        worst
    }

    /// Smallest index `N > N0` found such that the decaying part is below
    /// `delta` on `atoms` for every `n >= N`. Not necessarily minimal once
    /// the index exceeds `u64`.
    pub fn capacity_index(&self, atoms: &EventSet, delta: f64) -> Result<BigUint> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter("threshold must be positive".into()));
        }
        let start = self.prefix_len() + 1;
        let below = |b: f64| b < delta * (1.0 - 1e-12);
        if below(self.decay_bound_log2(atoms, 0)) {
            return Ok(BigUint::from(start));
        }
        // Exponential then binary search over k with n = 2^k.
        let mut hi = 1u64;
        while !below(self.decay_bound_log2(atoms, hi)) {
            hi *= 2;
            if hi > MAX_LOG2_INDEX {
                return Err(Error::TooLarge(format!(
                    "capacity index for threshold {delta:e} exceeds 2^{MAX_LOG2_INDEX}"
                )));
            }
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if below(self.decay_bound_log2(atoms, mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let n = if hi < 63 {
            // Refine within (2^(hi-1), 2^hi] using exact evaluations.
            let (mut a, mut b) = (1u64 << lo, 1u64 << hi);
            if below(self.decay_bound_at(atoms, &BigUint::from(a))) {
                b = a;
            }
            while b - a > 1 {
                let mid = a + (b - a) / 2;
                if below(self.decay_bound_at(atoms, &BigUint::from(mid))) {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            BigUint::from(b)
        } else {
            BigUint::one() << hi
        };
        Ok(n.max(BigUint::from(start)))
    }

    /// Atomwise `|X| + sum_k sup_n |a_n^(k)| |D_k|`, joined with the prefix.
    /// `None` when some term is unbounded on an atom it touches.
    pub fn triangle_dominator(&self) -> Option<RandomVariable<S>> {
        let mut y = self.base.abs();
        for t in &self.terms {
            if t.direction.values().iter().all(|d| d.is_zero()) {
                continue;
            }
            let sup = S::from_rational(&t.rate.sup_abs()?);
            y = y.add(&t.direction.abs().scale(&sup)).ok()?;
        }
        for x in &self.prefix {
            y = y.max(&x.abs()).ok()?;
        }
        Some(y)
    }

    /// Whether every term is atomwise nondecreasing in `n` beyond the prefix.
    pub fn is_eventually_nondecreasing(&self) -> bool {
        (0..self.size()).all(|i| {
            let p = self.profile(i);
            p.oscillation.is_zero()
                && p.growth.values().all(|(a, b)| !a.is_negative() && b.is_zero())
                && p.decay.values().all(|(a, b)| !a.is_positive() && b.is_zero())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn rv(v: &[i64]) -> RandomVariable<Rational> {
        RandomVariable::new(v.iter().map(|&x| int(x)).collect())
    }

    fn harmonic() -> SequenceSpec<Rational> {
        SequenceSpec::new(rv(&[1, 2]))
            .with_term(RateSequence::power(int(1)).unwrap(), rv(&[2, -4]))
            .unwrap()
    }

    #[test]
    fn evaluates_terms_and_prefix() {
        let s = harmonic();
        assert_eq!(
            s.eval_at(2).unwrap().value,
            RandomVariable::new(vec![int(2), int(0)])
        );
        let g = SequenceSpec::new(rv(&[0]))
            .with_term(RateSequence::geometric(ratio(1, 2)).unwrap(), rv(&[1]))
            .unwrap();
        assert_eq!(g.eval_at(3).unwrap().value, RandomVariable::new(vec![ratio(1, 8)]));
        let z = rv(&[7, 7]);
        let p = harmonic().with_prefix(vec![z.clone(), z.clone()]).unwrap();
        assert_eq!(p.eval_at(1).unwrap().value, z);
        assert_eq!(p.eval_at(3).unwrap().value, s.eval_at(3).unwrap().value);
        assert!(s.eval_at(0).is_err());
    }

    #[test]
    fn limits_and_failures() {
        let s = harmonic();
        let l = s.limit_rv();
        assert!(l.exists());
        assert_eq!(l.candidate, rv(&[1, 2]));
        let c = SequenceSpec::new(rv(&[1, 2]))
            .with_term(RateSequence::constant(int(3)), rv(&[1, 0]))
            .unwrap();
        assert_eq!(c.limit_rv().candidate, rv(&[4, 2]));
        let alt = RateSequence::alternating(RateSequence::constant(int(1))).unwrap();
        let a = SequenceSpec::new(rv(&[0, 0, 0]))
            .with_term(alt.clone(), rv(&[1, 0, 2]))
            .unwrap();
        let l = a.limit_rv();
        assert_eq!(l.failing.iter().collect::<Vec<_>>(), vec![0, 2]);
        // Two opposite oscillations cancel.
        let cancel = a.with_term(alt, rv(&[-1, 0, -2])).unwrap();
        assert!(cancel.limit_rv().exists());
    }

    #[test]
    fn germs_follow_slowest_term() {
        let s = SequenceSpec::new(rv(&[0, 0]))
            .with_term(RateSequence::power(int(2)).unwrap(), rv(&[1, 1]))
            .unwrap()
            .with_term(RateSequence::power(int(1)).unwrap(), rv(&[-1, 0]))
            .unwrap();
        assert_eq!(
            s.germ(0, Parity::Even),
            Germ::Finite { value: int(0), side: Side::Below }
        );
        assert_eq!(
            s.germ(1, Parity::Odd),
            Germ::Finite { value: int(0), side: Side::Above }
        );
        let alt = RateSequence::alternating(RateSequence::power(int(1)).unwrap()).unwrap();
        let a = SequenceSpec::new(rv(&[0])).with_term(alt, rv(&[1])).unwrap();
        assert_eq!(a.germ(0, Parity::Even), Germ::Finite { value: int(0), side: Side::Above });
        assert_eq!(a.germ(0, Parity::Odd), Germ::Finite { value: int(0), side: Side::Below });
        let grow = SequenceSpec::new(rv(&[5]))
            .with_term(RateSequence::growth(int(1)).unwrap(), rv(&[-1]))
            .unwrap();
        assert_eq!(grow.germ(0, Parity::Even), Germ::NegInf);
    }

    #[test]
    fn capacity_index_is_certified() {
        let s = harmonic();
        let atoms = EventSet::full(2);
        // |a_n D| <= 4/n < 1/10 needs n > 40.
        let n = s.capacity_index(&atoms, 0.1).unwrap();
        assert_eq!(n, BigUint::from(41u32));
        let slow = SequenceSpec::new(rv(&[0]))
            .with_term(RateSequence::logpow(int(1)).unwrap(), rv(&[1]))
            .unwrap();
        let n = slow.capacity_index(&EventSet::full(1), 1e-3).unwrap();
        assert!(n.bits() > 1000);
        assert!(slow.decay_bound_at(&EventSet::full(1), &n) < 1e-3);
    }

    #[test]
    fn dominator_and_monotonicity() {
        let s = harmonic();
        assert_eq!(s.triangle_dominator().unwrap(), rv(&[3, 6]));
        let up = SequenceSpec::new(rv(&[1]))
            .with_term(RateSequence::power(int(1)).unwrap(), rv(&[-1]))
            .unwrap();
        assert!(up.is_eventually_nondecreasing());
        assert!(!harmonic().is_eventually_nondecreasing());
        let grow = SequenceSpec::new(rv(&[0]))
            .with_term(RateSequence::growth(int(1)).unwrap(), rv(&[1]))
            .unwrap();
        assert!(grow.triangle_dominator().is_none());
    }
}
