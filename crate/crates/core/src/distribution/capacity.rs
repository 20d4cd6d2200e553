//! Distribution capacities and distribution-function pairs.

use crate::distribution::realset::RealSet;
use crate::error::{Error, Result};
use crate::model::{CredalModel, EventSet, RandomVariable};
use crate::scalar::{render, render_decimal, Scalar};
use crate::verdict::Verdict;

/// Largest value set for the exhaustive 2-monotonicity check.
pub const MAX_VALUE_SET: usize = 12;

/// `C_X(A) = V(X in A)`.
pub fn distribution_capacity<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
    a: &RealSet<S>,
) -> Result<S> {
    model.check(x)?;
    Ok(model.capacity_unchecked(&preimage(x, a)))
}

pub fn preimage<S: Scalar>(x: &RandomVariable<S>, a: &RealSet<S>) -> EventSet {
    x.event_where(|v| a.contains(v))
}

/// Sorted distinct values of `X`.
pub fn value_set<S: Scalar>(x: &RandomVariable<S>) -> Vec<S> {
    let mut v = x.values().to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
    v.dedup();
    v
}

/// Values carrying positive upper capacity.
pub fn capacity_atoms<S: Scalar>(model: &CredalModel<S>, x: &RandomVariable<S>) -> Result<Vec<S>> {
    model.check(x)?;
    Ok(value_set(x)
        .into_iter()
        .filter(|v| model.capacity_unchecked(&x.event_where(|y| y == v)).is_positive())
        .collect())
}

/// `C_X` on every subset of the value set, indexed by bitmask.
fn value_capacities<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
    values: &[S],
) -> Vec<S> {
    let events: Vec<EventSet> = values
        .iter()
        .map(|v| x.event_where(|y| y == v))
        .collect();
    (0..1u64 << values.len())
        .map(|mask| {
            let mut e = EventSet::empty(x.len());
            for (i, ev) in events.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    e = e.union(ev);
                }
            }
            model.capacity_unchecked(&e)
        })
        .collect()
}

fn describe_mask<S: Scalar>(values: &[S], mask: u64) -> String {
    let parts: Vec<String> = (0..values.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| render(&values[i]))
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// Exhaustive 2-monotonicity over subsets of the value set; when it holds,
/// also checks superadditivity over disjoint families.
pub fn two_monotone_check<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
) -> Result<Verdict> {
    model.check(x)?;
    let values = value_set(x);
    if values.len() > MAX_VALUE_SET {
        return Err(Error::TooLarge(format!(
            "value set of {} points exceeds {MAX_VALUE_SET}",
            values.len()
        )));
    }
    let cap = value_capacities(model, x, &values);
    let full = 1u64 << values.len();
    for a in 0..full {
        for b in a + 1..full {
            let lhs = cap[(a | b) as usize].clone() + cap[(a & b) as usize].clone();
            let rhs = cap[a as usize].clone() + cap[b as usize].clone();
            if lhs < rhs {
                return Ok(Verdict::fail(
                    "2-monotonicity",
                    format!(
                        "A = {}, B = {}",
                        describe_mask(&values, a),
                        describe_mask(&values, b)
                    ),
                    format!(
                        "{} + {}",
                        render(&cap[(a | b) as usize]),
                        render(&cap[(a & b) as usize])
                    ),
                    format!("{} + {}", render(&cap[a as usize]), render(&cap[b as usize])),
                ));
            }
        }
    }
    // best[m]: largest sum of capacities over partitions of m.
    let mut best = vec![S::zero(); full as usize];
    for m in 1..full {
        let low = m & m.wrapping_neg();
        let rest = m ^ low;
        let mut top = cap[m as usize].clone();
        let mut sub = rest;
        loop {
            let part = sub | low;
            if part != m {
                let cand = cap[part as usize].clone() + best[(m ^ part) as usize].clone();
                if cand > top {
                    top = cand;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        if top > cap[m as usize] {
            return Ok(Verdict::fail(
                "superadditivity",
                format!("union {}", describe_mask(&values, m)),
                render(&cap[m as usize]),
                render(&top),
            ));
        }
        best[m as usize] = top;
    }
    Ok(Verdict::Holds)
}

/// Right-continuous step functions `F_upper(x) = V(X <= x)` and
/// `F_lower(x) = -E[-I{X <= x}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionPair<S> {
    /// Sorted distinct values of `X`.
    pub jumps: Vec<S>,
    /// Value on `[jumps[i], jumps[i+1])`.
    pub upper: Vec<S>,
    pub lower: Vec<S>,
}

impl<S: Scalar> DistributionPair<S> {
    fn index(&self, x: &S) -> Option<usize> {
        let k = self.jumps.partition_point(|j| j <= x);
        k.checked_sub(1)
    }

    pub fn upper_at(&self, x: &S) -> S {
        self.index(x).map_or_else(S::zero, |i| self.upper[i].clone())
    }

    pub fn lower_at(&self, x: &S) -> S {
        self.index(x).map_or_else(S::zero, |i| self.lower[i].clone())
    }

    /// Left limits `F(x-)`.
    pub fn upper_left(&self, x: &S) -> S {
        let k = self.jumps.partition_point(|j| j < x);
        k.checked_sub(1).map_or_else(S::zero, |i| self.upper[i].clone())
    }

    pub fn lower_left(&self, x: &S) -> S {
        let k = self.jumps.partition_point(|j| j < x);
        k.checked_sub(1).map_or_else(S::zero, |i| self.lower[i].clone())
    }

    /// Evaluation grid: every jump plus flanking midpoints and outer points.
    pub fn grid(&self) -> Vec<S> {
        let two = S::one() + S::one();
        let mut xs = Vec::new();
        let Some(first) = self.jumps.first() else {
            return xs;
        };
        xs.push(first.clone() - S::one());
        for (i, j) in self.jumps.iter().enumerate() {
            if i > 0 {
                xs.push((self.jumps[i - 1].clone() + j.clone()) / two.clone());
            }
            xs.push(j.clone());
        }
        xs.push(self.jumps.last().expect("nonempty").clone() + S::one());
        xs
    }

    /// CSV with header `x,F_upper,F_lower`, 12 decimal digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,F_upper,F_lower\n");
        for x in self.grid() {
            out.push_str(&format!(
                "{},{},{}\n",
                render_decimal(&x),
                render_decimal(&self.upper_at(&x)),
                render_decimal(&self.lower_at(&x))
            ));
        }
        out
    }
}

pub fn distribution_pair<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
) -> Result<DistributionPair<S>> {
    model.check(x)?;
    let jumps = value_set(x);
    let mut upper = Vec::with_capacity(jumps.len());
    let mut lower = Vec::with_capacity(jumps.len());
    for j in &jumps {
        let event = x.event_where(|v| v <= j);
        upper.push(model.capacity_unchecked(&event));
        lower.push(model.lower_capacity(&event)?);
    }
    Ok(DistributionPair {
        jumps,
        upper,
        lower,
    })
}

/// Ordering and bounds, monotone right-continuous steps, limits at the
/// ends, and continuity of both functions at every massless point.
pub fn pair_properties_check<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
) -> Result<Verdict> {
    let pair = distribution_pair(model, x)?;
    let grid = pair.grid();
    let (zero, one) = (S::zero(), S::one());
    let direct_upper = |t: &S| model.capacity_unchecked(&x.event_where(|v| v <= t));
    let direct_lower = |t: &S| {
        let e = x.event_where(|v| v <= t);
        model.lower_capacity(&e).expect("valid event")
    };
    for t in &grid {
        let (u, l) = (pair.upper_at(t), pair.lower_at(t));
        if !(zero <= l && l <= u && u <= one) {
            return Ok(Verdict::fail(
                "0 <= F_lower <= F_upper <= 1",
                format!("x = {}", render(t)),
                format!("F_lower = {}", render(&l)),
                format!("F_upper = {}", render(&u)),
            ));
        }
        if u != direct_upper(t) || l != direct_lower(t) {
            return Ok(Verdict::fail(
                "step representation",
                format!("x = {}", render(t)),
                format!("({}, {})", render(&u), render(&l)),
                format!("({}, {})", render(&direct_upper(t)), render(&direct_lower(t))),
            ));
        }
    }
    for w in grid.windows(2) {
        if pair.upper_at(&w[0]) > pair.upper_at(&w[1]) || pair.lower_at(&w[0]) > pair.lower_at(&w[1]) {
            return Ok(Verdict::fail(
                "monotone",
                format!("x = {} < {}", render(&w[0]), render(&w[1])),
                "decrease",
                "nondecreasing",
            ));
        }
    }
    // Right continuity: the value at each jump persists up to the next one.
    for (i, j) in pair.jumps.iter().enumerate() {
        let next = pair
            .jumps
            .get(i + 1)
            .cloned()
            .unwrap_or_else(|| j.clone() + S::one() + S::one());
        let inside = (j.clone() + next) / (S::one() + S::one());
        if direct_upper(&inside) != pair.upper[i] || direct_lower(&inside) != pair.lower[i] {
            return Ok(Verdict::fail(
                "right continuity",
                format!("x = {}", render(j)),
                render(&pair.upper[i]),
                render(&direct_upper(&inside)),
            ));
        }
    }
    let (first, last) = (grid.first().expect("grid"), grid.last().expect("grid"));
    if !pair.upper_at(first).is_zero() || !pair.lower_at(first).is_zero() {
        return Ok(Verdict::fail("limit at -inf", render(first), render(&pair.upper_at(first)), "0"));
    }
    if pair.upper_at(last) != one || pair.lower_at(last) != one {
        return Ok(Verdict::fail("limit at +inf", render(last), render(&pair.lower_at(last)), "1"));
    }
    for t in &grid {
        let mass = model.capacity_unchecked(&x.event_where(|v| v == t));
        if !mass.is_zero() {
            continue;
        }
        if pair.upper_at(t) != pair.upper_left(t) {
            return Ok(Verdict::fail(
                "F_upper continuous at massless point",
                format!("x = {}", render(t)),
                render(&pair.upper_at(t)),
                render(&pair.upper_left(t)),
            ));
        }
        if pair.lower_at(t) != pair.lower_left(t) {
            return Ok(Verdict::fail(
                "F_lower continuous at massless point",
                format!("x = {}", render(t)),
                render(&pair.lower_at(t)),
                render(&pair.lower_left(t)),
            ));
        }
    }
    Ok(Verdict::Holds)
}

/// The literal lower-function continuity statement: wherever
/// `E[-I{X = x}] = 0`, `F_lower` has no jump at `x`. This is false in
/// general, so the check can fail on valid models.
pub fn lower_continuity_claim<S: Scalar>(
    model: &CredalModel<S>,
    x: &RandomVariable<S>,
) -> Result<Verdict> {
    let pair = distribution_pair(model, x)?;
    for t in pair.grid() {
        let event = x.event_where(|v| *v == t);
        let neg = model.upper_unchecked(&RandomVariable::indicator(&event).neg());
        if !neg.is_zero() {
            continue;
        }
        if pair.lower_at(&t) != pair.lower_left(&t) {
            return Ok(Verdict::fail(
                "F_lower continuous where E[-I{X = x}] = 0",
                format!("x = {}, X = {x}", render(&t)),
                format!("F_lower(x) = {}", render(&pair.lower_at(&t))),
                format!("F_lower(x-) = {}", render(&pair.lower_left(&t))),
            ));
        }
    }
    Ok(Verdict::Holds)
}
