//! Seminorms, integrability classes and the monotone convergence check.

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::model::{CredalModel, RandomVariable};
use crate::scalar::{approx_eq, approx_le, int, max_of, render, render_decimal, Rational, Scalar};
use crate::sequence::{Germ, Parity, SequenceSpec};
use crate::verdict::Verdict;

/// Tables longer than this are truncated in reports.
const MAX_TABULATED: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormReport<S> {
    pub p: Rational,
    /// `E[|X|^p]`.
    pub pth_power: S,
    pub pth_power_exact: bool,
    pub value: S,
    pub value_exact: bool,
    /// `value` at 12 decimal digits.
    pub decimal: String,
}

fn check_p(p: &Rational) -> Result<()> {
    if *p < int(1) {
        return Err(Error::InvalidParameter(format!(
            "p must be >= 1, got {}",
            render(p)
        )));
    }
    Ok(())
}

/// `E[|X|^p]` together with an exactness flag.
pub fn pth_moment<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
    p: &Rational,
) -> Result<(S, bool)> {
    model.check(x)?;
    let mut exact = true;
    let powered = RandomVariable::new(
        x.values()
            .iter()
            .map(|v| {
                let (r, e) = v.abs_pow(p);
                exact &= e;
                r
            })
            .collect(),
    );
    Ok((model.upper_unchecked(&powered), exact && S::EXACT))
}

pub fn lp_seminorm<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
    p: &Rational,
) -> Result<SeminormReport<S>> {
    check_p(p)?;
    let (moment, moment_exact) = pth_moment(model, x, p)?;
    let (value, root_exact) = moment.abs_pow(&p.recip());
    let value_exact = moment_exact && root_exact && S::EXACT;
    Ok(SeminormReport {
        p: p.clone(),
        decimal: render_decimal(&value),
        pth_power: moment,
        pth_power_exact: moment_exact,
        value,
        value_exact,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbReport<S> {
    /// `E[|X|^p I{|X| > n}]` for `n = 1, 2, ...` up to the stabilization index.
    pub tails: Vec<S>,
    /// First `n >= 1` with a zero tail.
    pub stabilization: u64,
    pub verdict: Verdict,
}

pub fn lb_membership<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
    p: &Rational,
) -> Result<LbReport<S>> {
    check_p(p)?;
    model.check(x)?;
    let abs = x.abs();
    let powered = abs.map(|v| v.abs_pow(p).0);
    let bound = ceil_of(&x.max_abs()).max(1);
    if bound > MAX_TABULATED {
        return Err(Error::TooLarge(format!(
            "tail table up to n = {bound} exceeds {MAX_TABULATED}"
        )));
    }
    let mut tails = Vec::new();
    let mut stabilization = None;
    for n in 1..=bound {
        let cut = S::from_int(n as i64);
        let event = abs.event_where(|v| *v > cut);
        let tail = model.upper_unchecked(&powered.mul(&RandomVariable::indicator(&event))?);
        let zero = tail.is_zero();
        tails.push(tail);
        if zero {
            stabilization = Some(n);
            break;
        }
    }
    let stabilization = stabilization.expect("tail vanishes once n >= max|X|");
    let verdict = if stabilization <= bound {
        Verdict::Holds
    } else {
        Verdict::fail(
            "stabilization bound",
            format!("X = {x}"),
            stabilization.to_string(),
            bound.to_string(),
        )
    };
    Ok(LbReport {
        tails,
        stabilization,
        verdict,
    })
}

fn ceil_of<S: Scalar>(x: &S) -> u64 {
    let r = x.to_rational();
    let c = r.numer().div_ceil(r.denom());
    c.to_u64().unwrap_or(u64::MAX)
}

/// A family for the uniform integrability check.
#[derive(Debug, Clone, Copy)]
pub enum UiFamily<'a, S> {
    List(&'a [RandomVariable<S>]),
    Sequence(&'a SequenceSpec<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModulusValue<S> {
    Finite(S),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UiReport<S> {
    /// Cutoff `c` paired with `sup_K E[I{|X| >= c} |X|]`, in increasing `c`.
    pub modulus: Vec<(S, ModulusValue<S>)>,
    /// Bound beyond which the modulus is zero, when one exists.
    pub cutoff: Option<S>,
    pub verdict: Verdict,
}

fn tail_mass<S: Scalar>(model: &CredalModel<S>, x: &RandomVariable<S>, c: &S) -> S {
    let abs = x.abs();
    let event = abs.event_where(|v| v >= c);
    model.upper_unchecked(&abs.mul(&RandomVariable::indicator(&event)).expect("same space"))
}

pub fn uniform_integrability<S: Scalar>(
    model: &CredalModel<S>,
    family: UiFamily<'_, S>,
) -> Result<UiReport<S>> {
    match family {
        UiFamily::List(list) => {
            for x in list {
                model.check(x)?;
            }
            let bound = max_of(list.iter().map(|x| x.max_abs())).unwrap_or_else(S::zero);
            let mut cutoffs: Vec<S> = list
                .iter()
                .flat_map(|x| x.values().iter().map(|v| v.abs()))
                .filter(|v| v.is_positive())
                .collect();
            cutoffs.push(bound.clone() + S::one());
            cutoffs.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
            cutoffs.dedup();
            let modulus = cutoffs
                .into_iter()
                .map(|c| {
                    let m = max_of(list.iter().map(|x| tail_mass(model, x, &c)))
                        .unwrap_or_else(S::zero);
                    (c, ModulusValue::Finite(m))
                })
                .collect();
            Ok(UiReport {
                modulus,
                cutoff: Some(bound),
                verdict: Verdict::Holds,
            })
        }
        UiFamily::Sequence(seq) => sequence_ui(model, seq),
    }
}

fn sequence_ui<S: Scalar>(model: &CredalModel<S>, seq: &SequenceSpec<S>) -> Result<UiReport<S>> {
    model.check(seq.base())?;
    if seq.is_tabulated_only() {
        return uniform_integrability(model, UiFamily::List(seq.prefix()));
    }
    let nonpolar = model.nonpolar_atoms();
    let unbounded: Vec<usize> = nonpolar
        .iter()
        .filter(|&w| {
            Parity::BOTH
                .iter()
                .any(|&p| !matches!(seq.germ(w, p), Germ::Finite { .. }))
        })
        .collect();
    // Bound on |X_n| over bounded non-polar atoms: growth terms cancel there.
    let mut bound = S::zero();
    for w in nonpolar.iter().filter(|w| !unbounded.contains(w)) {
        let mut b = seq.base().get(w).abs();
        for t in seq.terms() {
            let d = t.direction.get(w);
            if d.is_zero() {
                continue;
            }
            if let Some(sup) = t.rate.sup_abs() {
                b = b + S::from_rational(&sup) * d.abs();
            }
        }
        if b > bound {
            bound = b;
        }
    }
    for x in seq.prefix() {
        for w in nonpolar.iter() {
            let v = x.get(w).abs();
            if v > bound {
                bound = v;
            }
        }
    }
    if unbounded.is_empty() {
        let c = bound.clone() + S::one();
        return Ok(UiReport {
            modulus: vec![(c, ModulusValue::Finite(S::zero()))],
            cutoff: Some(bound),
            verdict: Verdict::Holds,
        });
    }
    let c = S::from_int(ceil_of(&bound) as i64 + 1);
    let step = ceil_of(&c).max(1);
    let mut samples = Vec::new();
    let mut n = step.max(seq.prefix_len() + 1);
    for _ in 0..6 {
        let x = seq.eval_at(n)?.value;
        samples.push((n, tail_mass(model, &x, &c)));
        n *= 2;
    }
    let (last_n, last) = samples.last().cloned().expect("sampled");
    let listing = samples
        .iter()
        .map(|(n, v)| format!("n={n}: {}", render(v)))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(UiReport {
        modulus: vec![(c.clone(), ModulusValue::Unbounded)],
        cutoff: None,
        verdict: Verdict::fail(
            "uniform integrability",
            format!(
                "cutoff c = {}, unbounded atoms {:?}, subfamily {listing}",
                render(&c),
                unbounded
            ),
            format!("E[I{{|X_n| >= c}}|X_n|] = {} at n = {last_n}", render(&last)),
            "grows without bound in n",
        ),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport<S> {
    /// `E[X_n]` for the sampled indices `1..`.
    pub expectations: Vec<S>,
    pub limit_expectation: S,
    /// Upper bound on `E[X] - E[X_n]` at the last sampled index and beyond.
    pub residual_bound: f64,
    pub verdict: Verdict,
}

/// Checks `E[X_n]` increases to `E[X]` for an atomwise nondecreasing
/// sequence with pointwise limit `X`.
pub fn monotone_convergence_check<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    limit: &RandomVariable<S>,
) -> Result<MonotoneReport<S>> {
    model.check(limit)?;
    model.check(seq.base())?;
    let analytic = !seq.is_tabulated_only();
    let last = if analytic {
        seq.prefix_len() + 16
    } else {
        seq.prefix_len()
    };
    let mut values = Vec::new();
    for n in 1..=last {
        values.push(seq.eval_at(n)?.value);
    }
    for (i, pair) in values.windows(2).enumerate() {
        if !pair[1].values().iter().zip(pair[0].values()).all(|(b, a)| approx_le(a, b)) {
            return Err(Error::Precondition(format!(
                "sequence decreases between n = {} and n = {}",
                i + 1,
                i + 2
            )));
        }
    }
    if analytic && !seq.is_eventually_nondecreasing() {
        return Err(Error::Precondition(
            "rate signs do not certify an atomwise nondecreasing sequence".into(),
        ));
    }
    let info = seq.limit_rv();
    let pointwise = if analytic {
        info.exists() && info.candidate == *limit
    } else {
        true
    };
    if !pointwise {
        return Err(Error::Precondition(format!(
            "declared limit {limit} is not the pointwise limit {}",
            info.candidate
        )));
    }
    let expectations: Vec<S> = values.iter().map(|x| model.upper_unchecked(x)).collect();
    let limit_expectation = model.upper_unchecked(limit);
    let mut verdict = Verdict::Holds;
    for (i, pair) in expectations.windows(2).enumerate() {
        if !approx_le(&pair[0], &pair[1]) {
            verdict = Verdict::fail(
                "monotone expectations",
                format!("n = {}", i + 1),
                render(&pair[0]),
                render(&pair[1]),
            );
            break;
        }
    }
    if verdict.holds() {
        if let Some(e) = expectations.iter().find(|e| !approx_le(*e, &limit_expectation)) {
            verdict = Verdict::fail(
                "bounded by limit expectation",
                "sampled n",
                render(e),
                render(&limit_expectation),
            );
        }
    }
    let residual_bound = if analytic {
        seq.decay_bound_at(&model.nonpolar_atoms(), &last.max(1).into())
    } else {
        let gap = limit_expectation.clone() - expectations.last().cloned().unwrap_or_else(S::zero);
        gap.as_f64().abs()
    };
    if verdict.holds() && !analytic {
        let at_end = expectations.last().cloned().unwrap_or_else(S::zero);
        if !approx_eq(&at_end, &limit_expectation) {
            verdict = Verdict::NumericOnly {
                n_checked: last,
                residual: residual_bound,
            };
        }
    }
    Ok(MonotoneReport {
        expectations,
        limit_expectation,
        residual_bound,
        verdict,
    })
}
