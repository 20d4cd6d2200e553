//! Piecewise-linear functions with finitely many jump points.

use std::fmt;

use crate::distribution::realset::RealSet;
use crate::error::{Error, Result};
use crate::model::RandomVariable;
use crate::scalar::{render, Scalar};
use crate::sequence::{Germ, Side};

/// Left limit, value and right limit at a breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Knot<S> {
    pub x: S,
    pub left: S,
    pub value: S,
    pub right: S,
}

impl<S: Scalar> Knot<S> {
    pub fn continuous(x: S, y: S) -> Self {
        Knot {
            x,
            left: y.clone(),
            value: y.clone(),
            right: y,
        }
    }
}

/// Linear between consecutive knots (from the right limit of one to the left
/// limit of the next) and constant beyond the outer knots.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn<S> {
    knots: Vec<Knot<S>>,
    constant: S,
}

impl<S: Scalar> PiecewiseFn<S> {
    pub fn constant(c: S) -> Self {
        PiecewiseFn {
            knots: Vec::new(),
            constant: c,
        }
    }

    pub fn new(knots: Vec<Knot<S>>) -> Result<Self> {
        if knots.windows(2).any(|w| w[0].x >= w[1].x) {
            return Err(Error::InvalidParameter(
                "knots must be strictly increasing".into(),
            ));
        }
        let constant = knots.first().map_or_else(S::zero, |k| k.left.clone());
        Ok(PiecewiseFn { knots, constant })
    }

    /// Continuous interpolation through `(x, y)` points.
    pub fn through(points: Vec<(S, S)>) -> Result<Self> {
        Self::new(
            points
                .into_iter()
                .map(|(x, y)| Knot::continuous(x, y))
                .collect(),
        )
    }

    pub fn indicator(set: &RealSet<S>) -> Self {
        let one = |b: bool| if b { S::one() } else { S::zero() };
        let knots = set
            .boundary()
            .into_iter()
            .map(|x| Knot {
                left: one(set.contains_left(&x)),
                value: one(set.contains(&x)),
                right: one(set.contains_right(&x)),
                x,
            })
            .collect::<Vec<_>>();
        if knots.is_empty() {
            return Self::constant(one(set.contains_pos_inf()));
        }
        PiecewiseFn {
            knots,
            constant: S::zero(),
        }
    }

    pub fn knots(&self) -> &[Knot<S>] {
        &self.knots
    }

    fn locate(&self, x: &S) -> std::result::Result<usize, usize> {
        self.knots
            .binary_search_by(|k| k.x.partial_cmp(x).expect("ordered"))
    }

    pub fn eval(&self, x: &S) -> S {
        if self.knots.is_empty() {
            return self.constant.clone();
        }
        match self.locate(x) {
            Ok(i) => self.knots[i].value.clone(),
            Err(0) => self.knots[0].left.clone(),
            Err(i) if i == self.knots.len() => self.knots[i - 1].right.clone(),
            Err(i) => {
                let (a, b) = (&self.knots[i - 1], &self.knots[i]);
                let t = (x.clone() - a.x.clone()) / (b.x.clone() - a.x.clone());
                a.right.clone() + (b.left.clone() - a.right.clone()) * t
            }
        }
    }

    pub fn right_limit(&self, x: &S) -> S {
        match self.locate(x) {
            Ok(i) => self.knots[i].right.clone(),
            Err(_) => self.eval(x),
        }
    }

    pub fn left_limit(&self, x: &S) -> S {
        match self.locate(x) {
            Ok(i) => self.knots[i].left.clone(),
            Err(_) => self.eval(x),
        }
    }

    pub fn at_pos_inf(&self) -> S {
        self.knots
            .last()
            .map_or_else(|| self.constant.clone(), |k| k.right.clone())
    }

    pub fn at_neg_inf(&self) -> S {
        self.knots
            .first()
            .map_or_else(|| self.constant.clone(), |k| k.left.clone())
    }

    /// Eventual value of `f(x_n)` along a sequence with the given germ.
    pub fn eval_germ(&self, g: &Germ<S>) -> S {
        match g {
            Germ::PosInf => self.at_pos_inf(),
            Germ::NegInf => self.at_neg_inf(),
            Germ::Finite { value, side } => match side {
                Side::Exact => self.eval(value),
                Side::Above => self.right_limit(value),
                Side::Below => self.left_limit(value),
            },
        }
    }

    pub fn apply(&self, x: &RandomVariable<S>) -> RandomVariable<S> {
        x.map(|v| self.eval(v))
    }

    pub fn apply_germs(&self, germs: &[Germ<S>]) -> RandomVariable<S> {
        RandomVariable::new(germs.iter().map(|g| self.eval_germ(g)).collect())
    }

    fn map_values(&self, f: impl Fn(&S) -> S) -> Self {
        PiecewiseFn {
            knots: self
                .knots
                .iter()
                .map(|k| Knot {
                    x: k.x.clone(),
                    left: f(&k.left),
                    value: f(&k.value),
                    right: f(&k.right),
                })
                .collect(),
            constant: f(&self.constant),
        }
    }

    pub fn neg(&self) -> Self {
        self.map_values(|v| -v.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_values(|v| v.clone() * c.clone())
    }

    pub fn shift(&self, c: &S) -> Self {
        self.map_values(|v| v.clone() + c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut xs: Vec<S> = self
            .knots
            .iter()
            .chain(other.knots.iter())
            .map(|k| k.x.clone())
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
        xs.dedup();
        let knots = xs
            .into_iter()
            .map(|x| Knot {
                left: self.left_limit(&x) + other.left_limit(&x),
                value: self.eval(&x) + other.eval(&x),
                right: self.right_limit(&x) + other.right_limit(&x),
                x,
            })
            .collect();
        PiecewiseFn {
            knots,
            constant: self.constant.clone() + other.constant.clone(),
        }
    }

    /// Points where the function is not continuous.
    pub fn discontinuities(&self) -> Vec<S> {
        self.knots
            .iter()
            .filter(|k| !(k.left == k.value && k.value == k.right))
            .map(|k| k.x.clone())
            .collect()
    }

    pub fn is_continuous(&self) -> bool {
        self.discontinuities().is_empty()
    }

    pub fn is_lower_semicontinuous(&self) -> bool {
        self.knots.iter().all(|k| k.value <= k.left && k.value <= k.right)
    }

    pub fn is_upper_semicontinuous(&self) -> bool {
        self.knots.iter().all(|k| k.value >= k.left && k.value >= k.right)
    }

    pub fn is_bounded(&self) -> bool {
        true
    }
}

impl<S: Scalar> fmt::Display for PiecewiseFn<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.knots.is_empty() {
            return write!(f, "const {}", render(&self.constant));
        }
        let parts: Vec<String> = self
            .knots
            .iter()
            .map(|k| {
                if k.left == k.value && k.value == k.right {
                    format!("{}:{}", render(&k.x), render(&k.value))
                } else {
                    format!(
                        "{}:{}|{}|{}",
                        render(&k.x),
                        render(&k.left),
                        render(&k.value),
                        render(&k.right)
                    )
                }
            })
            .collect();
        write!(f, "pl[{}]", parts.join(", "))
    }
}
