//! Brute-force reference computations. Nothing here calls into the library:
//! measures are plain weight rows and every quantity is a direct
//! enumeration or a per-index evaluation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(s: &str) -> Q {
    match s.split_once('/') {
        Some((a, b)) => Q::new(a.trim().parse::<BigInt>().unwrap(), b.trim().parse::<BigInt>().unwrap()),
        None => Q::from_integer(s.trim().parse::<BigInt>().unwrap()),
    }
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn qv(xs: &[&str]) -> Vec<Q> {
    xs.iter().map(|s| q(s)).collect()
}

pub fn show(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Clone, Debug)]
pub struct Credal {
    pub rows: Vec<Vec<Q>>,
}

impl Credal {
    pub fn new(rows: &[&[&str]]) -> Self {
        Credal {
            rows: rows.iter().map(|r| qv(r)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.rows[0].len()
    }

    pub fn linear(&self, x: &[Q]) -> Vec<Q> {
        self.rows
            .iter()
            .map(|p| p.iter().zip(x).fold(Q::zero(), |acc, (w, v)| acc + w * v))
            .collect()
    }

    pub fn upper(&self, x: &[Q]) -> Q {
        self.linear(x).into_iter().max().unwrap()
    }

    pub fn lower(&self, x: &[Q]) -> Q {
        self.linear(x).into_iter().min().unwrap()
    }

    pub fn cap(&self, event: &[bool]) -> Q {
        self.upper(&ind(event))
    }

    pub fn lower_cap(&self, event: &[bool]) -> Q {
        self.lower(&ind(event))
    }

    pub fn polar_atom(&self, i: usize) -> bool {
        self.rows.iter().all(|p| p[i].is_zero())
    }

    /// `max_P P(X in A)` with `A` given by a predicate on values.
    pub fn dist_cap(&self, x: &[Q], pred: impl Fn(&Q) -> bool) -> Q {
        self.cap(&x.iter().map(pred).collect::<Vec<_>>())
    }

    pub fn cdf_upper(&self, x: &[Q], t: &Q) -> Q {
        self.dist_cap(x, |v| v <= t)
    }

    pub fn cdf_lower(&self, x: &[Q], t: &Q) -> Q {
        self.lower_cap(&x.iter().map(|v| v <= t).collect::<Vec<_>>())
    }
}

pub fn ind(event: &[bool]) -> Vec<Q> {
    event.iter().map(|&b| if b { Q::one() } else { Q::zero() }).collect()
}

pub fn abs(x: &[Q]) -> Vec<Q> {
    x.iter().map(|v| v.abs()).collect()
}

pub fn sub(x: &[Q], y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn powi(x: &[Q], p: i32) -> Vec<Q> {
    x.iter().map(|v| num_traits::pow(v.clone(), p as usize)).collect()
}

/// Rates with rational values at every index.
#[derive(Clone, Debug)]
pub enum Rate {
    /// `n^-p`.
    InvPow(u32),
    /// `r^n`.
    Geometric(Q),
    /// `(-1)^n c`.
    AltConst(Q),
    /// `n`.
    Linear,
}

impl Rate {
    pub fn at(&self, n: u64) -> Q {
        match self {
            Rate::InvPow(p) => Q::new(BigInt::one(), num_traits::pow(BigInt::from(n), *p as usize)),
            Rate::Geometric(r) => num_traits::pow(r.clone(), n as usize),
            Rate::AltConst(c) => {
                if n % 2 == 1 {
                    -c.clone()
                } else {
                    c.clone()
                }
            }
            Rate::Linear => qi(n as i64),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Seq {
    pub base: Vec<Q>,
    pub terms: Vec<(Rate, Vec<Q>)>,
    pub prefix: Vec<Vec<Q>>,
}

impl Seq {
    pub fn new(base: Vec<Q>) -> Self {
        Seq {
            base,
            terms: vec![],
            prefix: vec![],
        }
    }

    pub fn term(mut self, rate: Rate, d: Vec<Q>) -> Self {
        self.terms.push((rate, d));
        self
    }

    pub fn at(&self, n: u64) -> Vec<Q> {
        if (n as usize) <= self.prefix.len() {
            return self.prefix[n as usize - 1].clone();
        }
        let mut v = self.base.clone();
        for (rate, d) in &self.terms {
            let a = rate.at(n);
            for (x, dd) in v.iter_mut().zip(d) {
                *x += &a * dd;
            }
        }
        v
    }
}

/// Deviation `|X_n - X|` on non-polar atoms only.
fn deviation(m: &Credal, s: &Seq, x: &[Q], n: u64) -> Vec<Q> {
    abs(&sub(&s.at(n), x))
        .into_iter()
        .enumerate()
        .map(|(i, v)| if m.polar_atom(i) { Q::zero() } else { v })
        .collect()
}

/// Non-polar atoms where the even and odd subsequences end far apart.
pub fn parity_split_atoms(m: &Credal, s: &Seq, n: u64) -> Vec<usize> {
    let (a, b) = (s.at(2 * n), s.at(2 * n + 1));
    (0..m.size())
        .filter(|&i| !m.polar_atom(i) && (&a[i] - &b[i]).abs() >= q("1/100"))
        .collect()
}

pub const EPS: [&str; 3] = ["1", "1/2", "1/10"];

/// V(|X_n - X| >= eps) for every index in `[from, to]`.
pub fn capacity_terms(m: &Credal, s: &Seq, x: &[Q], eps: &Q, from: u64, to: u64) -> Vec<Q> {
    (from..=to)
        .map(|n| m.dist_cap(&deviation(m, s, x, n), |v| v >= eps))
        .collect()
}

/// Pointwise convergence on non-polar atoms: the deviation over the last
/// half of `1..=n` stays below `1/1000`.
pub fn qs(m: &Credal, s: &Seq, x: &[Q], n: u64) -> bool {
    (n / 2..=n).all(|k| deviation(m, s, x, k).iter().all(|d| d < &q("1/1000")))
}

/// Capacity of every deviation event vanishes over the last half.
pub fn capacity(m: &Credal, s: &Seq, x: &[Q], n: u64) -> bool {
    EPS.iter()
        .all(|e| capacity_terms(m, s, x, &q(e), n / 2, n).iter().all(Zero::is_zero))
}

/// Partial sums of `V(|X_n - X| >= eps)` stop growing: the summands are zero
/// from `n/2` on, so the series is a finite sum.
pub fn complete(m: &Credal, s: &Seq, x: &[Q], n: u64) -> bool {
    capacity(m, s, x, n)
}

pub fn lp_moment(m: &Credal, s: &Seq, x: &[Q], p: i32, n: u64) -> Q {
    m.upper(&powi(&deviation(m, s, x, n), p))
}

/// `E[|X_n - X|^p]` is below `1/100` at `n` and non-increasing over the
/// last half.
pub fn lp(m: &Credal, s: &Seq, x: &[Q], p: i32, n: u64) -> bool {
    let vals: Vec<Q> = (n / 2..=n).map(|k| lp_moment(m, s, x, p, k)).collect();
    vals.windows(2).all(|w| w[1] <= w[0]) && vals.last().unwrap() < &q("1/100")
}

/// Decides the block sum over `(n, 2n]` of `E[|X_k - X|^r]` against `1/100`
/// from its bounds `n m(2n) <= block <= n m(n+1)`, valid for non-increasing
/// moments `m`. For harmonic rates the block stays near `ln 2 * E|D|`
/// however large `n` is.
pub fn slr(m: &Credal, s: &Seq, x: &[Q], r: i32, n: u64) -> bool {
    let count = qi(n as i64);
    let lo = &count * lp_moment(m, s, x, r, 2 * n);
    let hi = &count * lp_moment(m, s, x, r, n + 1);
    let cut = q("1/100");
    assert!(hi < cut || lo >= cut, "block bounds straddle the cut at n = {n}");
    hi < cut
}

/// Bounded continuous probes used for convergence in distribution.
pub fn probes() -> Vec<Box<dyn Fn(&Q) -> Q>> {
    let clamp = |lo: Q, hi: Q| move |v: &Q| v.clone().max(lo.clone()).min(hi.clone());
    vec![
        Box::new(clamp(qi(-1), qi(1))),
        Box::new(clamp(qi(0), qi(3))),
        Box::new(|v: &Q| Q::one() / (Q::one() + v * v)),
        Box::new(|v: &Q| -(Q::one() / (Q::one() + v * v))),
        Box::new(|v: &Q| (Q::one() - (v - qi(2)).abs()).max(Q::zero())),
    ]
}

/// `E[f(X_n)]` within `1/100` of `E[f(X)]` for every probe, at both parities.
pub fn distribution(m: &Credal, s: &Seq, x: &[Q], n: u64) -> bool {
    probes().iter().all(|f| {
        let target = m.upper(&x.iter().map(f).collect::<Vec<_>>());
        [n, n + 1].iter().all(|&k| {
            let xk = s.at(k);
            (m.upper(&xk.iter().map(f).collect::<Vec<_>>()) - &target).abs() < q("1/100")
        })
    })
}

/// First `n >= 1` where `|X_n| > Y` on some atom.
pub fn first_domination_break(s: &Seq, y: &[Q], limit: u64) -> Option<(usize, u64)> {
    (1..=limit).find_map(|n| {
        let xn = s.at(n);
        (0..y.len()).find(|&i| xn[i].abs() > y[i]).map(|i| (i, n))
    })
}

/// `C(A u B) + C(A n B) >= C(A) + C(B)` over all pairs of value subsets.
pub fn two_monotone_counterexample(m: &Credal, x: &[Q]) -> Option<(Vec<Q>, Vec<Q>)> {
    let mut values: Vec<Q> = x.to_vec();
    values.sort();
    values.dedup();
    let k = values.len();
    let subset = |mask: usize| -> Vec<Q> {
        (0..k).filter(|i| mask >> i & 1 == 1).map(|i| values[i].clone()).collect()
    };
    let c = |set: &[Q]| m.dist_cap(x, |v| set.contains(v));
    for a in 0..1usize << k {
        for b in 0..1usize << k {
            let (sa, sb) = (subset(a), subset(b));
            let lhs = c(&subset(a | b)) + c(&subset(a & b));
            if lhs < c(&sa) + c(&sb) {
                return Some((sa, sb));
            }
        }
    }
    None
}

/// Values carrying positive capacity.
pub fn capacity_atoms(m: &Credal, x: &[Q]) -> Vec<Q> {
    let mut values: Vec<Q> = x.to_vec();
    values.sort();
    values.dedup();
    values
        .into_iter()
        .filter(|t| m.dist_cap(x, |v| v == t).is_positive())
        .collect()
}

/// `F_upper` and `F_lower` sampled at each distinct value of `X`.
pub fn step_pair(m: &Credal, x: &[Q]) -> Vec<(Q, Q, Q)> {
    let mut values: Vec<Q> = x.to_vec();
    values.sort();
    values.dedup();
    values
        .into_iter()
        .map(|t| (t.clone(), m.cdf_upper(x, &t), m.cdf_lower(x, &t)))
        .collect()
}

pub fn render_pair(pair: &[(Q, Q, Q)]) -> String {
    pair.iter()
        .map(|(t, u, l)| format!("{}:({}, {})", show(t), show(u), show(l)))
        .collect::<Vec<_>>()
        .join(" ")
}
