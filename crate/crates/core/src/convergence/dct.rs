use num_bigint::BigUint;
use num_traits::Signed;

use super::{check_convergence, Mode, ModeParams, MAX_SCAN};
use crate::error::{Error, Result};
use crate::model::{CredalModel, RandomVariable};
use crate::scalar::{max_of, render, Rational, Scalar};
use crate::sequence::{Germ, Parity, SequenceSpec};
use crate::spaces::{lb_membership, LbReport};
use crate::verdict::Verdict;

fn violation<S: Scalar>(atom: usize, n: impl ToString, value: &S, bound: &S) -> Error {
    Error::DominationViolated {
        atom,
        n: n.to_string(),
        value: render(value),
        bound: render(bound),
    }
}

/// Outcome of comparing `|X_n(w)|` with `Y(w)` at one index.
enum Probe {
    Within,
    Violated,
    Unclear,
}

fn probe_at<S: Scalar>(seq: &SequenceSpec<S>, atom: usize, n: &BigUint, bound: &S) -> Result<(Probe, S)> {
    let e = seq.eval_big(n)?;
    let v = e.value.get(atom).abs();
    if e.is_exact() {
        let p = if v <= *bound { Probe::Within } else { Probe::Violated };
        return Ok((p, v));
    }
    let (vf, bf) = (v.as_f64(), bound.as_f64());
    let p = if vf + e.err <= bf {
        Probe::Within
    } else if vf - e.err > bf {
        Probe::Violated
    } else {
        Probe::Unclear
    };
    Ok((p, v))
}

/// Searches for an index where `|X_n(w)| > Y(w)`: exhaustively up to the
/// scan limit, then along powers of two.
fn find_violation<S: Scalar>(seq: &SequenceSpec<S>, atom: usize, bound: &S) -> Result<Option<Error>> {
    let start = seq.prefix_len() + 1;
    for n in start..start + MAX_SCAN {
        if let (Probe::Violated, v) = probe_at(seq, atom, &BigUint::from(n), bound)? {
            return Ok(Some(violation(atom, n, &v, bound)));
        }
    }
    let mut n = BigUint::from(start + MAX_SCAN);
    for _ in 0..4096 {
        if let (Probe::Violated, v) = probe_at(seq, atom, &n, bound)? {
            return Ok(Some(violation(atom, &n, &v, bound)));
        }
        n <<= 1u32;
    }
    Ok(None)
}

/// Decides `|X_n| <= Y` atomwise for every `n`.
pub fn check_domination<S: Scalar>(seq: &SequenceSpec<S>, y: &RandomVariable<S>) -> Result<()> {
    if y.len() != seq.size() {
        return Err(Error::DimensionMismatch {
            expected: seq.size(),
            found: y.len(),
        });
    }
    for (i, x) in seq.prefix().iter().enumerate() {
        for w in 0..seq.size() {
            let v = x.get(w).abs();
            if v > *y.get(w) {
                return Err(violation(w, i + 1, &v, y.get(w)));
            }
        }
    }
    if seq.is_tabulated_only() {
        return Ok(());
    }
    for w in 0..seq.size() {
        if triangle_bound(seq, w).is_some_and(|b| b <= *y.get(w)) {
            continue;
        }
        check_atom(seq, w, y.get(w))?;
    }
    Ok(())
}

fn triangle_bound<S: Scalar>(seq: &SequenceSpec<S>, w: usize) -> Option<S> {
    let mut total = seq.base().get(w).abs();
    for t in seq.terms() {
        let d = t.direction.get(w);
        if d.is_zero() {
            continue;
        }
        total = total + S::from_rational(&t.rate.sup_abs()?) * d.abs();
    }
    Some(total)
}

fn check_atom<S: Scalar>(seq: &SequenceSpec<S>, w: usize, bound: &S) -> Result<()> {
    let germs: Vec<Germ<S>> = Parity::BOTH.iter().map(|&p| seq.germ(w, p)).collect();
    let finite: Option<Vec<S>> = germs.iter().map(|g| g.finite_value().map(|v| v.abs())).collect();
    let limit = finite.and_then(|v| max_of(v));
    match limit {
        Some(l) if l < *bound => {
            let delta = (bound.clone() - l).as_f64();
            let single = crate::model::EventSet::new(seq.size(), [w])?;
            let m = seq.capacity_index(&single, delta)?;
            let start = seq.prefix_len() + 1;
            let end = m.clone().min(BigUint::from(start + MAX_SCAN));
            if m > end {
                return Err(Error::Precondition(format!(
                    "domination at atom {w} needs an exact scan up to n = {m}"
                )));
            }
            let mut n = BigUint::from(start);
            while n < end {
                match probe_at(seq, w, &n, bound)? {
                    (Probe::Within, _) => {}
                    (Probe::Violated, v) => return Err(violation(w, &n, &v, bound)),
                    (Probe::Unclear, _) => {
                        return Err(Error::Precondition(format!(
                            "domination at atom {w}, n = {n} is within rounding error"
                        )))
                    }
                }
                n += 1u32;
            }
            Ok(())
        }
        _ => match find_violation(seq, w, bound)? {
            Some(e) => Err(e),
            None => Err(Error::Precondition(format!(
                "domination at atom {w} is tight and cannot be decided from the rates"
            ))),
        },
    }
}

/// One sampled index of the certificate's bound chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DctSample<S> {
    pub n: BigUint,
    /// `E[|X_n - X| I{|X_n| <= c, |X| <= c}]`.
    pub truncation: S,
    /// `2 E[|X_n| I{|X_n| > c}]`.
    pub tail_n: S,
    /// `2 E[|X| I{|X| > c}]`.
    pub tail_limit: S,
    /// `E[|X_n - X|]`.
    pub distance: S,
    /// Rounding error of `X_n` when its rates are irrational at `n`.
    pub err: f64,
    pub certified: bool,
}

impl<S: Scalar> DctSample<S> {
    pub fn bound(&self) -> S {
        self.truncation.clone() + self.tail_n.clone() + self.tail_limit.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DctCertificate<S> {
    pub epsilon: S,
    /// Truncation level; both tail terms vanish above `max Y`.
    pub c: S,
    pub n: BigUint,
    pub samples: Vec<DctSample<S>>,
    /// Upper bound on `sup_{m >= n} E[|X_m - X|]` from the rates.
    pub analytic_tail: f64,
    /// `V(|X_n - X| > eps/4)` at the threshold index.
    pub capacity_at_n: S,
    /// The limit lies in `L^1_b`.
    pub lb_check: LbReport<S>,
    pub verdict: Verdict,
}

pub fn sample_terms<S: Scalar>(
    model: &CredalModel<S>,
    xn: &RandomVariable<S>,
    x: &RandomVariable<S>,
    c: &S,
) -> Result<(S, S, S, S)> {
    let two = S::one() + S::one();
    let dev = xn.sub(x)?.abs();
    let core = xn
        .abs()
        .event_where(|v| v <= c)
        .intersection(&x.abs().event_where(|v| v <= c));
    let truncation = model.upper_unchecked(&dev.mul(&RandomVariable::indicator(&core))?);
    let tail = |z: &RandomVariable<S>| -> Result<S> {
        let big = z.abs().event_where(|v| v > c);
        Ok(two.clone() * model.upper_unchecked(&z.abs().mul(&RandomVariable::indicator(&big))?))
    };
    Ok((truncation, tail(xn)?, tail(x)?, model.upper_unchecked(&dev)))
}

pub fn dct_certificate<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    y: &RandomVariable<S>,
    epsilon: &Rational,
    params: &ModeParams,
) -> Result<DctCertificate<S>> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    model.check(y)?;
    check_domination(seq, y)?;
    if seq.is_tabulated_only() {
        return Err(Error::Precondition(
            "a certificate needs an analytic sequence".into(),
        ));
    }
    let capacity = check_convergence(model, seq, &params.with_mode(Mode::Capacity))?;
    if !capacity.holds() {
        return Err(Error::Precondition(
            "sequence does not converge in capacity".into(),
        ));
    }
    let x = seq.require_target()?;
    let eps = S::from_rational(epsilon);
    let four = S::from_int(4);
    let c = max_of(y.values().iter().cloned()).expect("nonempty") + S::one();
    let nonpolar = model.nonpolar_atoms();
    let n = seq.capacity_index(&nonpolar, (eps.clone() / four.clone()).as_f64())?;

    let mut indices: Vec<BigUint> = [1u32, 2, 3]
        .iter()
        .map(|d| &n + (d - 1))
        .chain([2u32, 4, 16, 100].iter().map(|k| &n * k))
        .collect();
    indices.sort();
    indices.dedup();
    let mut samples = Vec::with_capacity(indices.len());
    for m in indices {
        let e = seq.eval_big(&m)?;
        let (truncation, tail_n, tail_limit, distance) = sample_terms(model, &e.value, &x, &c)?;
        let slack = S::from_f64(e.err);
        let certified = distance.clone() + slack.clone() < eps
            && truncation.clone() + tail_n.clone() + tail_limit.clone() + slack < eps;
        samples.push(DctSample {
            n: m,
            truncation,
            tail_n,
            tail_limit,
            distance,
            err: e.err,
            certified,
        });
    }
    let analytic_tail = seq.decay_bound_at(&nonpolar, &n);
    let xn = seq.eval_big(&n)?.value;
    let dev = xn.sub(&x)?.abs();
    let capacity_at_n = model.capacity_unchecked(&dev.event_where(|v| *v > eps.clone() / four.clone()));
    let lb_check = lb_membership(model, &x, &Rational::from_integer(1.into()))?;

    let verdict = if let Some(s) = samples.iter().find(|s| !s.certified) {
        Verdict::fail(
            "E[|X_n - X|] < eps beyond the certificate index",
            format!("n = {}", s.n),
            render(&s.distance),
            render(&eps),
        )
    } else if !(analytic_tail < eps.as_f64()) {
        Verdict::fail(
            "sup over the tail of E[|X_n - X|] < eps",
            format!("n >= {n}"),
            format!("{analytic_tail:e}"),
            render(&eps),
        )
    } else {
        Verdict::Holds
    };
    Ok(DctCertificate {
        epsilon: eps,
        c,
        n,
        samples,
        analytic_tail,
        capacity_at_n,
        lb_check,
        verdict,
    })
}
