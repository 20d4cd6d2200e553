//! Finite unions of real intervals in canonical form.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, render, Scalar};

/// An interval; `None` endpoints are infinite (and always open).
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<S> {
    pub lo: Option<S>,
    pub lo_closed: bool,
    pub hi: Option<S>,
    pub hi_closed: bool,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: Option<S>, lo_closed: bool, hi: Option<S>, hi_closed: bool) -> Result<Self> {
        let iv = Interval {
            lo_closed: lo_closed && lo.is_some(),
            hi_closed: hi_closed && hi.is_some(),
            lo,
            hi,
        };
        if let (Some(a), Some(b)) = (&iv.lo, &iv.hi) {
            if a > b || (a == b && !(iv.lo_closed && iv.hi_closed)) {
                return Err(Error::InvalidParameter(format!("empty interval {iv}")));
            }
        }
        Ok(iv)
    }

    pub fn point(x: S) -> Self {
        Interval {
            lo: Some(x.clone()),
            lo_closed: true,
            hi: Some(x),
            hi_closed: true,
        }
    }

    pub fn contains(&self, x: &S) -> bool {
        let above = match &self.lo {
            None => true,
            Some(a) => a < x || (a == x && self.lo_closed),
        };
        let below = match &self.hi {
            None => true,
            Some(b) => x < b || (x == b && self.hi_closed),
        };
        above && below
    }

    /// Some interval `(x, x + d)` lies inside.
    pub fn contains_right(&self, x: &S) -> bool {
        self.lo.as_ref().is_none_or(|a| a <= x) && self.hi.as_ref().is_none_or(|b| x < b)
    }

    /// Some interval `(x - d, x)` lies inside.
    pub fn contains_left(&self, x: &S) -> bool {
        self.lo.as_ref().is_none_or(|a| a < x) && self.hi.as_ref().is_none_or(|b| x <= b)
    }

    fn cmp_lo(&self, other: &Self) -> Ordering {
        match (&self.lo, &other.lo) {
            (None, None) => Ordering::Equal,
            (None, _) => Ordering::Less,
            (_, None) => Ordering::Greater,
            (Some(a), Some(b)) => a
                .partial_cmp(b)
                .expect("ordered")
                .then(other.lo_closed.cmp(&self.lo_closed)),
        }
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(a), Some(b)) = (&self.lo, &self.hi) {
            if a == b {
                return write!(f, "{{{}}}", render(a));
            }
        }
        let lo = self.lo.as_ref().map_or("-inf".to_string(), render);
        let hi = self.hi.as_ref().map_or("inf".to_string(), render);
        write!(
            f,
            "{}{lo},{hi}{}",
            if self.lo_closed { '[' } else { '(' },
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Sorted, disjoint, maximally merged union of intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSet<S> {
    intervals: Vec<Interval<S>>,
}

impl<S: Scalar> RealSet<S> {
    pub fn empty() -> Self {
        RealSet {
            intervals: Vec::new(),
        }
    }

    pub fn full() -> Self {
        RealSet {
            intervals: vec![Interval {
                lo: None,
                lo_closed: false,
                hi: None,
                hi_closed: false,
            }],
        }
    }

    pub fn from_intervals(mut intervals: Vec<Interval<S>>) -> Self {
        intervals.sort_by(|a, b| a.cmp_lo(b));
        let mut out: Vec<Interval<S>> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            let Some(cur) = out.last_mut() else {
                out.push(iv);
                continue;
            };
            let touches = match (&cur.hi, &iv.lo) {
                (None, _) | (_, None) => true,
                (Some(h), Some(l)) => l < h || (l == h && (cur.hi_closed || iv.lo_closed)),
            };
            if !touches {
                out.push(iv);
                continue;
            }
            match (&cur.hi, &iv.hi) {
                (None, _) => {}
                (_, None) => {
                    cur.hi = None;
                    cur.hi_closed = false;
                }
                (Some(a), Some(b)) => {
                    if b > a {
                        cur.hi = iv.hi.clone();
                        cur.hi_closed = iv.hi_closed;
                    } else if a == b {
                        cur.hi_closed |= iv.hi_closed;
                    }
                }
            }
        }
        RealSet { intervals: out }
    }

    pub fn points(xs: impl IntoIterator<Item = S>) -> Self {
        Self::from_intervals(xs.into_iter().map(Interval::point).collect())
    }

    pub fn interval(iv: Interval<S>) -> Self {
        RealSet {
            intervals: vec![iv],
        }
    }

    /// `(a, b)`, with `None` for an infinite end.
    pub fn open(a: Option<S>, b: Option<S>) -> Result<Self> {
        Ok(Self::interval(Interval::new(a, false, b, false)?))
    }

    /// `[a, b]`, with `None` for an infinite end.
    pub fn closed(a: Option<S>, b: Option<S>) -> Result<Self> {
        Ok(Self::interval(Interval::new(a, true, b, true)?))
    }

    /// `(a, b]`.
    pub fn left_open(a: Option<S>, b: Option<S>) -> Result<Self> {
        Ok(Self::interval(Interval::new(a, false, b, true)?))
    }

    pub fn intervals(&self) -> &[Interval<S>] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: &S) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn contains_right(&self, x: &S) -> bool {
        self.intervals.iter().any(|iv| iv.contains_right(x))
    }

    pub fn contains_left(&self, x: &S) -> bool {
        self.intervals.iter().any(|iv| iv.contains_left(x))
    }

    pub fn contains_pos_inf(&self) -> bool {
        self.intervals.last().is_some_and(|iv| iv.hi.is_none())
    }

    pub fn contains_neg_inf(&self) -> bool {
        self.intervals.first().is_some_and(|iv| iv.lo.is_none())
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        Self::from_intervals(all)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut start: Option<(S, bool)> = None;
        let mut at_neg_inf = true;
        for iv in &self.intervals {
            if let Some(lo) = &iv.lo {
                let gap = Interval {
                    lo: start.as_ref().map(|s| s.0.clone()),
                    lo_closed: start.as_ref().is_some_and(|s| s.1),
                    hi: Some(lo.clone()),
                    hi_closed: !iv.lo_closed,
                };
                if at_neg_inf || start.is_some() {
                    out.push(gap);
                }
            }
            at_neg_inf = false;
            match &iv.hi {
                Some(hi) => start = Some((hi.clone(), !iv.hi_closed)),
                None => return RealSet { intervals: out },
            }
        }
        out.push(Interval {
            lo: start.as_ref().map(|s| s.0.clone()),
            lo_closed: start.as_ref().is_some_and(|s| s.1),
            hi: None,
            hi_closed: false,
        });
        RealSet { intervals: out }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn interior(&self) -> Self {
        RealSet {
            intervals: self
                .intervals
                .iter()
                .filter(|iv| !matches!((&iv.lo, &iv.hi), (Some(a), Some(b)) if a == b))
                .map(|iv| Interval {
                    lo: iv.lo.clone(),
                    lo_closed: false,
                    hi: iv.hi.clone(),
                    hi_closed: false,
                })
                .collect(),
        }
    }

    pub fn closure(&self) -> Self {
        Self::from_intervals(
            self.intervals
                .iter()
                .map(|iv| Interval {
                    lo_closed: iv.lo.is_some(),
                    hi_closed: iv.hi.is_some(),
                    lo: iv.lo.clone(),
                    hi: iv.hi.clone(),
                })
                .collect(),
        )
    }

    /// Finite boundary points, sorted.
    pub fn boundary(&self) -> Vec<S> {
        let mut pts: Vec<S> = Vec::new();
        for iv in &self.intervals {
            for e in [&iv.lo, &iv.hi].into_iter().flatten() {
                if pts.last() != Some(e) {
                    pts.push(e.clone());
                }
            }
        }
        pts
    }

    pub fn is_open(&self) -> bool {
        self.intervals.iter().all(|iv| !iv.lo_closed && !iv.hi_closed)
    }

    pub fn is_closed(&self) -> bool {
        self.intervals
            .iter()
            .all(|iv| iv.lo_closed == iv.lo.is_some() && iv.hi_closed == iv.hi.is_some())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Parses text such as `"(0,3] U {2}"`, `"[1,inf)"`, `"R"` or `"{}"`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "R" {
            return Ok(Self::full());
        }
        if t == "{}" || t.is_empty() {
            return Ok(Self::empty());
        }
        let bad = || Error::Parse(format!("not a real set: {text:?}"));
        let mut intervals = Vec::new();
        for part in t.split('U').map(str::trim) {
            if let Some(inner) = part.strip_prefix('{').and_then(|p| p.strip_suffix('}')) {
                for x in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    intervals.push(Interval::point(S::from_rational(&parse_rational(x)?)));
                }
                continue;
            }
            let lo_closed = match part.chars().next() {
                Some('[') => true,
                Some('(') => false,
                _ => return Err(bad()),
            };
            let hi_closed = match part.chars().last() {
                Some(']') => true,
                Some(')') => false,
                _ => return Err(bad()),
            };
            let (a, b) = part[1..part.len() - 1].split_once(',').ok_or_else(bad)?;
            let end = |s: &str, inf: &[&str]| -> Result<Option<S>> {
                let s = s.trim();
                if inf.contains(&s) {
                    Ok(None)
                } else {
                    Ok(Some(S::from_rational(&parse_rational(s)?)))
                }
            };
            let lo = end(a, &["-inf"])?;
            let hi = end(b, &["inf", "+inf"])?;
            if (lo.is_none() && lo_closed) || (hi.is_none() && hi_closed) {
                return Err(bad());
            }
            intervals.push(Interval::new(lo, lo_closed, hi, hi_closed)?);
        }
        Ok(Self::from_intervals(intervals))
    }
}

impl<S: Scalar> fmt::Display for RealSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        if *self == Self::full() {
            return write!(f, "R");
        }
        let parts: Vec<String> = self.intervals.iter().map(|iv| iv.to_string()).collect();
        write!(f, "{}", parts.join(" U "))
    }
}
