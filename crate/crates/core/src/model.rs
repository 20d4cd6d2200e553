//! Finite credal models: a sample space, a finite family of probability
//! measures, random variables, events, and the upper/lower expectations and
//! capacities they induce.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{approx_eq, max_of, render, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSpace {
    atoms: Vec<String>,
}

impl SampleSpace {
    pub fn new<I, T>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let atoms: Vec<String> = labels.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::DuplicateAtom(a.clone()));
            }
        }
        Ok(SampleSpace { atoms })
    }

    /// Space with labels `w0, w1, ...`.
    pub fn anonymous(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| format!("w{i}")))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.atoms
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.atoms
            .iter()
            .position(|a| a == label)
            .ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }
}

/// A probability measure on the atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<S> {
    weights: Vec<S>,
}

impl<S: Scalar> Measure<S> {
    pub fn new(weights: Vec<S>) -> Result<Self> {
        Self::named("measure", weights)
    }

    /// Validates nonnegativity and total mass one; `name` appears in errors.
    pub fn named(name: &str, weights: Vec<S>) -> Result<Self> {
        for (atom, w) in weights.iter().enumerate() {
            if w.is_negative() {
                return Err(Error::NegativeWeight {
                    measure: name.to_string(),
                    atom,
                    weight: render(w),
                });
            }
        }
        let sum = weights.iter().fold(S::zero(), |acc, w| acc + w.clone());
        if !approx_eq(&sum, &S::one()) {
            return Err(Error::WeightSum {
                measure: name.to_string(),
                sum: render(&sum),
            });
        }
        Ok(Measure { weights })
    }

    /// Point mass on `atom`.
    pub fn dirac(size: usize, atom: usize) -> Result<Self> {
        if atom >= size {
            return Err(Error::InvalidAtom { index: atom, size });
        }
        let mut weights = vec![S::zero(); size];
        weights[atom] = S::one();
        Ok(Measure { weights })
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn expectation(&self, x: &RandomVariable<S>) -> S {
        self.weights
            .iter()
            .zip(&x.values)
            .filter(|(w, _)| !w.is_zero())
            .fold(S::zero(), |acc, (w, v)| acc + w.clone() * v.clone())
    }

    pub fn probability(&self, event: &EventSet) -> S {
        event
            .iter()
            .fold(S::zero(), |acc, i| acc + self.weights[i].clone())
    }
}

/// A set of atom indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventSet {
    size: usize,
    members: BTreeSet<usize>,
}

impl EventSet {
    pub fn new(size: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&i| i >= size) {
            return Err(Error::InvalidAtom { index: bad, size });
        }
        Ok(EventSet { size, members })
    }

    pub fn empty(size: usize) -> Self {
        EventSet {
            size,
            members: BTreeSet::new(),
        }
    }

    pub fn full(size: usize) -> Self {
        EventSet {
            size,
            members: (0..size).collect(),
        }
    }

    pub fn from_mask(size: usize, mask: u64) -> Self {
        EventSet {
            size,
            members: (0..size.min(64)).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn mask(&self) -> u64 {
        self.members
            .iter()
            .filter(|&&i| i < 64)
            .fold(0u64, |m, &i| m | 1 << i)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.contains(&atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn insert(&mut self, atom: usize) {
        debug_assert!(atom < self.size);
        self.members.insert(atom);
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        EventSet {
            size: self.size,
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &EventSet) -> EventSet {
        EventSet {
            size: self.size,
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    pub fn difference(&self, other: &EventSet) -> EventSet {
        EventSet {
            size: self.size,
            members: self.members.difference(&other.members).copied().collect(),
        }
    }

    pub fn complement(&self) -> EventSet {
        EventSet {
            size: self.size,
            members: (0..self.size).filter(|i| !self.contains(*i)).collect(),
        }
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.members.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// A real value per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable<S> {
    values: Vec<S>,
}

impl<S: Scalar> RandomVariable<S> {
    pub fn new(values: Vec<S>) -> Self {
        RandomVariable { values }
    }

    pub fn constant(size: usize, c: S) -> Self {
        RandomVariable {
            values: vec![c; size],
        }
    }

    pub fn indicator(event: &EventSet) -> Self {
        RandomVariable {
            values: (0..event.size())
                .map(|i| if event.contains(i) { S::one() } else { S::zero() })
                .collect(),
        }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, atom: usize) -> &S {
        &self.values[atom]
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        RandomVariable {
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(RandomVariable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v.clone())
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|v| v.clone() * k.clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() * b.clone())
    }

    pub fn max(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| if a >= b { a.clone() } else { b.clone() })
    }

    pub fn min(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| if a <= b { a.clone() } else { b.clone() })
    }

    /// Largest absolute value over all atoms.
    pub fn max_abs(&self) -> S {
        max_of(self.values.iter().map(|v| v.abs())).unwrap_or_else(S::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// The atoms on which `pred` holds.
    pub fn event_where(&self, pred: impl Fn(&S) -> bool) -> EventSet {
        EventSet {
            size: self.len(),
            members: self
                .values
                .iter()
                .enumerate()
                .filter(|(_, v)| pred(v))
                .map(|(i, _)| i)
                .collect(),
        }
    }

    pub fn ge_all(&self, other: &Self) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a >= b)
    }
}

impl<S: Scalar> fmt::Display for RandomVariable<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.values.iter().map(render).collect();
        write!(f, "({})", items.join(", "))
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A functional on random variables. Implemented by [`CredalModel`] (its
/// upper expectation) and by closures, which is how doctored functionals are
/// injected for negative testing.
pub trait Expectation<S> {
    fn expect(&self, x: &RandomVariable<S>) -> S;
}

impl<S, F> Expectation<S> for F
where
    F: Fn(&RandomVariable<S>) -> S,
{
    fn expect(&self, x: &RandomVariable<S>) -> S {
        self(x)
    }
}

/// Sample space plus a nonempty finite family of measures on it.
#[derive(Debug, Clone, PartialEq)]
pub struct CredalModel<S> {
    space: SampleSpace,
    measures: Vec<Measure<S>>,
}

impl<S: Scalar> CredalModel<S> {
    pub fn new(space: SampleSpace, measures: Vec<Measure<S>>) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::NoMeasures);
        }
        for m in &measures {
            check_len(space.len(), m.weights.len())?;
        }
        Ok(CredalModel { space, measures })
    }

    /// Convenience constructor from raw weight rows over anonymous atoms.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let size = rows.first().map(Vec::len).ok_or(Error::NoMeasures)?;
        let space = SampleSpace::anonymous(size)?;
        let measures = rows
            .into_iter()
            .enumerate()
            .map(|(i, w)| Measure::named(&format!("P{}", i + 1), w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, measures)
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn measures(&self) -> &[Measure<S>] {
        &self.measures
    }

    pub fn size(&self) -> usize {
        self.space.len()
    }

    pub fn check(&self, x: &RandomVariable<S>) -> Result<()> {
        check_len(self.size(), x.len())
    }

    pub fn check_event(&self, a: &EventSet) -> Result<()> {
        check_len(self.size(), a.size())
    }

    /// `max_P E_P[X]`.
    pub fn upper_expectation(&self, x: &RandomVariable<S>) -> Result<S> {
        self.check(x)?;
        Ok(self.upper_unchecked(x))
    }

    pub(crate) fn upper_unchecked(&self, x: &RandomVariable<S>) -> S {
        max_of(self.measures.iter().map(|m| m.expectation(x))).expect("nonempty family")
    }

    /// `-upper(-X) = min_P E_P[X]`.
    pub fn lower_expectation(&self, x: &RandomVariable<S>) -> Result<S> {
        Ok(-self.upper_expectation(&x.neg())?)
    }

    /// `V(A) = max_P P(A)`.
    pub fn capacity(&self, a: &EventSet) -> Result<S> {
        self.check_event(a)?;
        Ok(self.capacity_unchecked(a))
    }

    pub(crate) fn capacity_unchecked(&self, a: &EventSet) -> S {
        max_of(self.measures.iter().map(|m| m.probability(a))).expect("nonempty family")
    }

    /// `min_P P(A) = 1 - V(A^c)`.
    pub fn lower_capacity(&self, a: &EventSet) -> Result<S> {
        self.check_event(a)?;
        Ok(S::one() - self.capacity_unchecked(&a.complement()))
    }

    pub fn is_polar(&self, a: &EventSet) -> Result<bool> {
        Ok(self.capacity(a)?.is_zero())
    }

    /// Largest mass any measure puts on a single atom.
    pub fn atom_mass(&self, atom: usize) -> S {
        max_of(self.measures.iter().map(|m| m.weights[atom].clone())).expect("nonempty family")
    }

    /// Atoms carrying zero mass under every measure.
    pub fn polar_atoms(&self) -> EventSet {
        EventSet {
            size: self.size(),
            members: (0..self.size())
                .filter(|&i| self.atom_mass(i).is_zero())
                .collect(),
        }
    }

    pub fn nonpolar_atoms(&self) -> EventSet {
        self.polar_atoms().complement()
    }
}

impl<S: Scalar> Expectation<S> for CredalModel<S> {
    fn expect(&self, x: &RandomVariable<S>) -> S {
        self.upper_unchecked(x)
    }
}

/// Atomwise application of `f` to `(X_1(w), ..., X_k(w))`.
pub fn lift<S: Scalar>(
    f: impl Fn(&[S]) -> S,
    args: &[&RandomVariable<S>],
) -> Result<RandomVariable<S>> {
    let size = args
        .first()
        .map(|x| x.len())
        .ok_or_else(|| Error::InvalidParameter("lift needs at least one argument".into()))?;
    for x in args {
        check_len(size, x.len())?;
    }
    let mut buf = Vec::with_capacity(args.len());
    let values = (0..size)
        .map(|i| {
            buf.clear();
            buf.extend(args.iter().map(|x| x.values[i].clone()));
            f(&buf)
        })
        .collect();
    Ok(RandomVariable { values })
}

/// Every subset of a space with at most `max_atoms` atoms, as bitmasks.
pub(crate) fn all_masks(size: usize) -> impl Iterator<Item = u64> {
    assert!(size < 64);
    0..(1u64 << size)
}
