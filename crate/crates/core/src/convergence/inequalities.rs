use crate::error::{Error, Result};
use crate::model::{CredalModel, EventSet, RandomVariable};
use crate::scalar::{render, Rational, Scalar};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovReport<S> {
    /// `V(|X| >= lam)`.
    pub lhs: S,
    /// `E[|X|^p] / lam^p`.
    pub rhs: S,
    /// False when `rhs` went through an inexact power.
    pub exact: bool,
    pub verdict: Verdict,
}

pub fn markov_bound<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
    lam: &S,
    p: &Rational,
) -> Result<MarkovReport<S>> {
    if !lam.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {}",
            render(lam)
        )));
    }
    if *p < Rational::from_integer(1.into()) {
        return Err(Error::InvalidParameter(format!(
            "p must be at least 1, got {}",
            render(p)
        )));
    }
    model.check(x)?;
    let lhs = model.capacity_unchecked(&x.event_where(|v| v.abs() >= *lam));
    let mut exact = S::EXACT;
    let mut powered = Vec::with_capacity(x.len());
    for v in x.values() {
        let (r, e) = v.abs_pow(p);
        exact &= e;
        powered.push(r);
    }
    let powered = RandomVariable::new(powered);
    let (lam_p, e) = lam.abs_pow(p);
    exact &= e;
    let rhs = model.upper_unchecked(&powered) / lam_p;
    let verdict = if lhs <= rhs {
        Verdict::Holds
    } else {
        Verdict::fail(
            "V(|X| >= lam) <= E[|X|^p] / lam^p",
            format!("X = {x}, lam = {}, p = {}", render(lam), render(p)),
            render(&lhs),
            render(&rhs),
        )
    };
    Ok(MarkovReport {
        lhs,
        rhs,
        exact,
        verdict,
    })
}

/// Eventually periodic sequence of events: `prefix` followed by `cycle`
/// repeated forever.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSchedule {
    pub prefix: Vec<EventSet>,
    pub cycle: Vec<EventSet>,
}

impl EventSchedule {
    /// Finitely many events followed by empty sets.
    pub fn finite(size: usize, events: Vec<EventSet>) -> Self {
        EventSchedule {
            prefix: events,
            cycle: vec![EventSet::empty(size)],
        }
    }

    pub fn constant(event: EventSet) -> Self {
        EventSchedule {
            prefix: Vec::new(),
            cycle: vec![event],
        }
    }

    pub fn event(&self, n: usize) -> &EventSet {
        assert!(n >= 1, "events are indexed from 1");
        if n <= self.prefix.len() {
            &self.prefix[n - 1]
        } else {
            &self.cycle[(n - 1 - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Atoms in infinitely many events.
    pub fn limsup(&self, size: usize) -> EventSet {
        self.cycle
            .iter()
            .fold(EventSet::empty(size), |acc, e| acc.union(e))
    }
}

pub fn borel_cantelli_check<S: Scalar>(
    model: &CredalModel<S>,
    schedule: &EventSchedule,
) -> Result<Verdict> {
    if schedule.cycle.is_empty() {
        return Err(Error::InvalidParameter("event cycle is empty".into()));
    }
    for e in schedule.prefix.iter().chain(&schedule.cycle) {
        model.check_event(e)?;
    }
    // V takes finitely many values, so the series converges iff every
    // recurring event has capacity zero.
    for (i, e) in schedule.cycle.iter().enumerate() {
        let v = model.capacity_unchecked(e);
        if !v.is_zero() {
            return Err(Error::Precondition(format!(
                "sum of V(A_n) diverges: cycle event {i} has V = {} and recurs forever",
                render(&v)
            )));
        }
    }
    let limsup = schedule.limsup(model.size());
    let v = model.capacity_unchecked(&limsup);
    if v.is_zero() {
        Ok(Verdict::Holds)
    } else {
        Ok(Verdict::fail(
            "V(limsup A_n) = 0",
            format!("limsup = {} atoms", limsup.len()),
            render(&v),
            "0",
        ))
    }
}
