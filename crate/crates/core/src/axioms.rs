//! Axiom verification for sublinear expectations and the capacities they
//! induce.

use crate::error::{Error, Result};
use crate::model::{all_masks, CredalModel, EventSet, Expectation, RandomVariable};
use crate::scalar::{approx_eq, approx_le, max_of, min_of, render, Scalar};
use crate::verdict::Verdict;

/// Largest space for which every event is enumerated.
pub const MAX_ENUMERATED_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport<S> {
    pub verdict: Verdict,
    /// Gap `lim V(A_k) - V(lim A_k)` for every probed monotone chain; the
    /// finite chains stabilize so each entry is exactly zero.
    pub continuity_residuals: Vec<S>,
    pub events_checked: usize,
}

/// Checks the sublinear-expectation axioms of the model's upper expectation
/// on the supplied samples, and the capacity properties on all events.
pub fn verify_axioms<S: Scalar>(
    model: &CredalModel<S>,
    sample_pairs: &[(RandomVariable<S>, RandomVariable<S>)],
    lambdas: &[S],
) -> Result<AxiomReport<S>> {
    for (x, y) in sample_pairs {
        model.check(x)?;
        model.check(y)?;
    }
    verify_functional(model.size(), model, sample_pairs, lambdas)
}

/// Same checks against an arbitrary functional on a space of `size` atoms.
pub fn verify_functional<S: Scalar, E: Expectation<S> + ?Sized>(
    size: usize,
    e: &E,
    sample_pairs: &[(RandomVariable<S>, RandomVariable<S>)],
    lambdas: &[S],
) -> Result<AxiomReport<S>> {
    if size > 63 {
        return Err(Error::TooLarge(format!("{size} atoms")));
    }
    if let Some(l) = lambdas.iter().find(|l| l.is_negative()) {
        return Err(Error::InvalidParameter(format!(
            "homogeneity factor {} is negative",
            render(l)
        )));
    }
    let mut report = AxiomReport {
        verdict: Verdict::Holds,
        continuity_residuals: Vec::new(),
        events_checked: 0,
    };
    let checks: [&dyn Fn() -> Verdict; 4] = [
        &|| constant_preserving(size, e, sample_pairs, lambdas),
        &|| monotonicity(e, sample_pairs),
        &|| sub_additivity(e, sample_pairs),
        &|| positive_homogeneity(e, sample_pairs, lambdas),
    ];
    for check in checks {
        let v = check();
        if !v.holds() {
            report.verdict = v;
            return Ok(report);
        }
    }
    let (verdict, residuals, checked) = capacity_properties(size, e);
    report.verdict = verdict;
    report.continuity_residuals = residuals;
    report.events_checked = checked;
    Ok(report)
}

fn constant_preserving<S: Scalar, E: Expectation<S> + ?Sized>(
    size: usize,
    e: &E,
    pairs: &[(RandomVariable<S>, RandomVariable<S>)],
    lambdas: &[S],
) -> Verdict {
    let mut constants = vec![S::zero(), S::one(), -S::one()];
    constants.extend(lambdas.iter().cloned());
    for (x, y) in pairs {
        constants.extend(x.values().iter().cloned());
        constants.extend(y.values().iter().cloned());
    }
    constants.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    constants.dedup();
    for c in constants {
        let got = e.expect(&RandomVariable::constant(size, c.clone()));
        if !approx_eq(&got, &c) {
            return Verdict::fail(
                "constant preserving",
                format!("X = {}", render(&c)),
                render(&got),
                render(&c),
            );
        }
    }
    // E[X] must lie between the constants min X and max X.
    for x in pairs.iter().flat_map(|(x, y)| [x, y]) {
        let ex = e.expect(x);
        let hi = max_of(x.values().iter().cloned()).unwrap_or_else(S::zero);
        let lo = min_of(x.values().iter().cloned()).unwrap_or_else(S::zero);
        if !approx_le(&ex, &hi) {
            return Verdict::fail(
                "constant preserving",
                format!("E[X] <= E[max X] = max X for X = {x}"),
                render(&ex),
                render(&hi),
            );
        }
        if !approx_le(&lo, &ex) {
            return Verdict::fail(
                "constant preserving",
                format!("min X = E[min X] <= E[X] for X = {x}"),
                render(&lo),
                render(&ex),
            );
        }
    }
    Verdict::Holds
}

fn monotonicity<S: Scalar, E: Expectation<S> + ?Sized>(
    e: &E,
    pairs: &[(RandomVariable<S>, RandomVariable<S>)],
) -> Verdict {
    for (x, y) in pairs {
        let (Ok(hi), Ok(lo)) = (x.max(y), x.min(y)) else {
            continue;
        };
        let mut ordered = vec![(hi.clone(), x.clone()), (hi, y.clone())];
        ordered.push((x.clone(), lo.clone()));
        ordered.push((y.clone(), lo));
        if x.ge_all(y) {
            ordered.push((x.clone(), y.clone()));
        }
        for (big, small) in ordered {
            let (eb, es) = (e.expect(&big), e.expect(&small));
            if !approx_le(&es, &eb) {
                return Verdict::fail(
                    "monotonicity",
                    format!("X = {big} >= Y = {small}"),
                    render(&eb),
                    render(&es),
                );
            }
        }
    }
    Verdict::Holds
}

fn sub_additivity<S: Scalar, E: Expectation<S> + ?Sized>(
    e: &E,
    pairs: &[(RandomVariable<S>, RandomVariable<S>)],
) -> Verdict {
    for (x, y) in pairs {
        for (a, b) in [(x.clone(), y.clone()), (x.clone(), x.neg()), (y.clone(), y.neg())] {
            let Ok(sum) = a.add(&b) else { continue };
            let lhs = e.expect(&sum);
            let rhs = e.expect(&a) + e.expect(&b);
            if !approx_le(&lhs, &rhs) {
                return Verdict::fail(
                    "sub-additivity",
                    format!("X = {a}, Y = {b}"),
                    render(&lhs),
                    render(&rhs),
                );
            }
        }
    }
    Verdict::Holds
}

fn positive_homogeneity<S: Scalar, E: Expectation<S> + ?Sized>(
    e: &E,
    pairs: &[(RandomVariable<S>, RandomVariable<S>)],
    lambdas: &[S],
) -> Verdict {
    let mut factors = vec![S::zero(), S::one()];
    factors.extend(lambdas.iter().cloned());
    for x in pairs.iter().flat_map(|(x, y)| [x, y]) {
        let ex = e.expect(x);
        for l in &factors {
            let lhs = e.expect(&x.scale(l));
            let rhs = l.clone() * ex.clone();
            if !approx_eq(&lhs, &rhs) {
                return Verdict::fail(
                    "positive homogeneity",
                    format!("lambda = {}, X = {x}", render(l)),
                    render(&lhs),
                    render(&rhs),
                );
            }
        }
    }
    Verdict::Holds
}

/// Capacity properties over every event when the space is small enough,
/// otherwise over singletons and the probed chains only.
fn capacity_properties<S: Scalar, E: Expectation<S> + ?Sized>(
    size: usize,
    e: &E,
) -> (Verdict, Vec<S>, usize) {
    let cap = |mask: u64| e.expect(&RandomVariable::indicator(&EventSet::from_mask(size, mask)));
    let full: u64 = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
    let enumerate = size <= MAX_ENUMERATED_ATOMS;
    let masks: Vec<u64> = if enumerate {
        all_masks(size).collect()
    } else {
        let mut m: Vec<u64> = vec![0, full];
        m.extend((0..size).map(|i| 1u64 << i));
        m
    };
    let table: std::collections::HashMap<u64, S> =
        masks.iter().map(|&m| (m, cap(m))).collect();
    let v = |mask: u64| -> S { table.get(&mask).cloned().unwrap_or_else(|| cap(mask)) };
    let show = |mask: u64| EventSet::from_mask(size, mask).to_string();

    let (v_empty, v_full) = (v(0), v(full));
    if !v_empty.is_zero() || !v_full.is_one() {
        return (
            Verdict::fail(
                "capacity normalization",
                "V(empty) = 0 and V(Omega) = 1",
                render(&v_empty),
                render(&v_full),
            ),
            vec![],
            masks.len(),
        );
    }
    for &a in &masks {
        let va = v(a);
        if !approx_le(&S::zero(), &va) || !approx_le(&va, &S::one()) {
            return (
                Verdict::fail("capacity bounds", show(a), render(&va), "[0, 1]"),
                vec![],
                masks.len(),
            );
        }
        if enumerate {
            for i in 0..size {
                let b = a | 1 << i;
                if b != a && !approx_le(&va, &v(b)) {
                    return (
                        Verdict::fail(
                            "capacity monotonicity",
                            format!("A = {} subset of B = {}", show(a), show(b)),
                            render(&va),
                            render(&v(b)),
                        ),
                        vec![],
                        masks.len(),
                    );
                }
            }
        }
    }
    if enumerate {
        // Disjoint pairs suffice once monotonicity holds.
        for u in 0..=full {
            let vu = v(u);
            let mut a = u;
            loop {
                let b = u & !a;
                if a <= b {
                    let rhs = v(a) + v(b);
                    if !approx_le(&vu, &rhs) {
                        return (
                            Verdict::fail(
                                "capacity sub-additivity",
                                format!("A = {}, B = {}", show(a), show(b)),
                                render(&vu),
                                render(&rhs),
                            ),
                            vec![],
                            masks.len(),
                        );
                    }
                }
                if a == 0 {
                    break;
                }
                a = (a - 1) & u;
            }
        }
    }

    let mut residuals = Vec::new();
    for order in chain_orders(size) {
        // Increasing chain: A_k = first k atoms of `order`.
        let mut prefix = 0u64;
        let mut prev = v(0);
        for &atom in &order {
            let next_mask = prefix | 1 << atom;
            let next = v(next_mask);
            let increment = next.clone() - prev.clone();
            if !approx_le(&S::zero(), &increment) || !approx_le(&increment, &v(1 << atom)) {
                return (
                    Verdict::fail(
                        "continuity from below",
                        format!("A_k = {} up to {}", show(prefix), show(next_mask)),
                        render(&increment),
                        render(&v(1 << atom)),
                    ),
                    residuals,
                    masks.len(),
                );
            }
            prefix = next_mask;
            prev = next;
        }
        residuals.push(prev - v(full));

        // Decreasing chain down to the empty set.
        let mut current = full;
        let limit = v(0);
        for &atom in &order {
            let gap = v(current) - limit.clone();
            // 0 <= V(A_k) - V(A) <= E[I_{A_k} - I_A] with A empty.
            if !approx_le(&S::zero(), &gap) || !approx_le(&gap, &v(current)) {
                return (
                    Verdict::fail(
                        "continuity from above",
                        format!("A_k = {}", show(current)),
                        render(&gap),
                        render(&v(current)),
                    ),
                    residuals,
                    masks.len(),
                );
            }
            current &= !(1u64 << atom);
        }
        residuals.push(v(current) - limit);
    }
    (Verdict::Holds, residuals, masks.len())
}

/// Atom orders used for monotone chains: the identity, its reverse, and all
/// rotations of the identity.
fn chain_orders(size: usize) -> Vec<Vec<usize>> {
    let identity: Vec<usize> = (0..size).collect();
    let mut orders = vec![identity.iter().rev().copied().collect::<Vec<_>>()];
    for shift in 0..size {
        let mut o = identity.clone();
        o.rotate_left(shift);
        orders.push(o);
    }
    orders
}

/// Gaps `V(A_k) - V(A)` along a user-supplied decreasing chain whose
/// intersection is `A`. The final entry is the gap at stabilization.
pub fn continuity_from_above<S: Scalar>(
    model: &CredalModel<S>,
    chain: &[EventSet],
) -> Result<Vec<S>> {
    let Some(last) = chain.last() else {
        return Ok(vec![]);
    };
    let mut limit = last.clone();
    for w in chain.windows(2) {
        if !w[1].is_subset(&w[0]) {
            return Err(Error::Precondition(format!(
                "chain is not decreasing at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    for a in chain {
        model.check_event(a)?;
        limit = limit.intersection(a);
    }
    let v_limit = model.capacity(&limit)?;
    chain
        .iter()
        .map(|a| Ok(model.capacity(a)? - v_limit.clone()))
        .collect()
}
