//! Convergence in distribution: the six portmanteau claims, the
//! distribution-function criterion and the constant-limit upgrade.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use crate::convergence::{check_convergence, epsilon_grid, Mode, ModeParams};
use crate::distribution::function::PiecewiseFn;
use crate::distribution::realset::{Interval, RealSet};
use crate::error::{Error, Result};
use crate::model::{CredalModel, EventSet, RandomVariable};
use crate::scalar::{render, Scalar};
use crate::sequence::{Germ, Parity, SequenceSpec, Side};
use crate::verdict::Verdict;

/// Cell counts up to this size get every subset mask.
const FULL_MASK_CELLS: usize = 10;

/// `E[f(X)]` and the limits of `E[f(X_n)]` along even and odd `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple<S> {
    pub target: S,
    pub even: S,
    pub odd: S,
}

impl<S: Scalar> Triple<S> {
    pub fn liminf(&self) -> S {
        if self.even < self.odd {
            self.even.clone()
        } else {
            self.odd.clone()
        }
    }

    pub fn limsup(&self) -> S {
        if self.even > self.odd {
            self.even.clone()
        } else {
            self.odd.clone()
        }
    }

    pub fn converges(&self) -> bool {
        self.even == self.target && self.odd == self.target
    }

    /// Largest deviation of a subsequential limit from the target.
    pub fn residual(&self) -> f64 {
        let d1 = (self.even.clone() - self.target.clone()).abs().as_f64();
        let d2 = (self.odd.clone() - self.target.clone()).abs().as_f64();
        d1.max(d2)
    }
}

/// A bounded test function or a signed set indicator.
#[derive(Debug, Clone)]
pub enum Probe<S> {
    Function(PiecewiseFn<S>),
    Indicator { set: RealSet<S>, negated: bool },
}

impl<S: Scalar> Probe<S> {
    fn indicator(set: RealSet<S>) -> Self {
        Probe::Indicator {
            set,
            negated: false,
        }
    }

    fn negated(set: RealSet<S>) -> Self {
        Probe::Indicator { set, negated: true }
    }

    pub fn describe(&self) -> String {
        match self {
            Probe::Function(f) => format!("f = {f}"),
            Probe::Indicator { set, negated } => {
                format!("{}I_A, A = {set}", if *negated { "-" } else { "" })
            }
        }
    }
}

/// Limit behaviour of a sequence, reduced to what every claim needs.
pub struct LimitLaw<'m, S> {
    model: &'m CredalModel<S>,
    target: RandomVariable<S>,
    germs: [Vec<Germ<S>>; 2],
    points: Vec<S>,
    cuts: Vec<S>,
    numeric: Option<u64>,
    upper: RefCell<HashMap<u64, S>>,
    lower: RefCell<HashMap<u64, S>>,
}

impl<'m, S: Scalar> LimitLaw<'m, S> {
    pub fn new(model: &'m CredalModel<S>, seq: &SequenceSpec<S>) -> Result<Self> {
        model.check(seq.base())?;
        let target = seq.require_target()?;
        let (germs, numeric) = if seq.is_tabulated_only() {
            let last = seq.prefix().last().expect("nonempty table");
            let g: Vec<Germ<S>> = last
                .values()
                .iter()
                .map(|v| Germ::Finite {
                    value: v.clone(),
                    side: Side::Exact,
                })
                .collect();
            ([g.clone(), g], Some(seq.prefix_len()))
        } else {
            (
                [seq.germs(Parity::Even), seq.germs(Parity::Odd)],
                None,
            )
        };
        let mut points: Vec<S> = Vec::new();
        for w in model.nonpolar_atoms().iter() {
            points.push(target.get(w).clone());
            for g in &germs {
                if let Some(v) = g[w].finite_value() {
                    points.push(v.clone());
                }
            }
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
        points.dedup();
        let two = S::one() + S::one();
        let mut cuts = Vec::with_capacity(points.len() + 1);
        cuts.push(points[0].clone() - S::one());
        for w in points.windows(2) {
            cuts.push((w[0].clone() + w[1].clone()) / two.clone());
        }
        cuts.push(points.last().expect("nonempty").clone() + S::one());
        Ok(LimitLaw {
            model,
            target,
            germs,
            points,
            cuts,
            numeric,
            upper: RefCell::new(HashMap::new()),
            lower: RefCell::new(HashMap::new()),
        })
    }

    pub fn target(&self) -> &RandomVariable<S> {
        &self.target
    }

    /// Finite limit points and target values on non-polar atoms.
    pub fn points(&self) -> &[S] {
        &self.points
    }

    /// Points, separating midpoints and the two outer points, sorted.
    pub fn grid(&self) -> Vec<S> {
        let mut g = Vec::with_capacity(2 * self.points.len() + 1);
        for (i, c) in self.cuts.iter().enumerate() {
            g.push(c.clone());
            if let Some(p) = self.points.get(i) {
                g.push(p.clone());
            }
        }
        g
    }

    fn capacity(&self, e: &EventSet) -> S {
        let mask = e.mask();
        if let Some(v) = self.upper.borrow().get(&mask) {
            return v.clone();
        }
        let v = self.model.capacity_unchecked(e);
        self.upper.borrow_mut().insert(mask, v.clone());
        v
    }

    fn lower_capacity(&self, e: &EventSet) -> S {
        let mask = e.mask();
        if let Some(v) = self.lower.borrow().get(&mask) {
            return v.clone();
        }
        let v = self.model.lower_capacity(e).expect("valid event");
        self.lower.borrow_mut().insert(mask, v.clone());
        v
    }

    fn expect(&self, x: &RandomVariable<S>) -> S {
        let one = S::one();
        let neg_one = -S::one();
        if x.values().iter().all(|v| v.is_zero() || *v == one) {
            return self.capacity(&x.event_where(|v| *v == one));
        }
        if x.values().iter().all(|v| v.is_zero() || *v == neg_one) {
            return -self.lower_capacity(&x.event_where(|v| *v == neg_one));
        }
        self.model.upper_unchecked(x)
    }

    fn germ_event(&self, set: &RealSet<S>, parity: usize) -> EventSet {
        let size = self.target.len();
        let mut e = EventSet::empty(size);
        for (w, g) in self.germs[parity].iter().enumerate() {
            if germ_in(set, g) {
                e.insert(w);
            }
        }
        e
    }

    fn signed(&self, e: &EventSet, negated: bool) -> S {
        if negated {
            -self.lower_capacity(e)
        } else {
            self.capacity(e)
        }
    }

    pub fn evaluate(&self, probe: &Probe<S>) -> Triple<S> {
        match probe {
            Probe::Function(f) => Triple {
                target: self.expect(&f.apply(&self.target)),
                even: self.expect(&f.apply_germs(&self.germs[0])),
                odd: self.expect(&f.apply_germs(&self.germs[1])),
            },
            Probe::Indicator { set, negated } => {
                let x = self.target.event_where(|v| set.contains(v));
                Triple {
                    target: self.signed(&x, *negated),
                    even: self.signed(&self.germ_event(set, 0), *negated),
                    odd: self.signed(&self.germ_event(set, 1), *negated),
                }
            }
        }
    }

    fn n_cells(&self) -> usize {
        self.points.len() + 2
    }

    /// Subsets of cells `{-inf, p_1, .., p_k, +inf}` used by every family.
    pub fn masks(&self) -> Vec<u64> {
        let n = self.n_cells();
        let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        if n <= FULL_MASK_CELLS {
            return (1..=full).collect();
        }
        let mut set = BTreeSet::new();
        for i in 0..n {
            for j in i..n {
                let run = ((1u64 << (j - i + 1)) - 1) << i;
                let pair = (1u64 << i) | (1u64 << j);
                for m in [run, pair] {
                    set.insert(m);
                    set.insert(full ^ m);
                }
            }
        }
        set.remove(&0);
        set.into_iter().collect()
    }

    fn in_mask(mask: u64, cell: usize) -> bool {
        mask >> cell & 1 == 1
    }

    /// Continuous function equal to the mask's indicator on every cell.
    pub fn bump(&self, mask: u64) -> PiecewiseFn<S> {
        let k = self.points.len();
        let one = |b: bool| if b { S::one() } else { S::zero() };
        let mut pts = vec![
            (self.cuts[0].clone() - S::one(), one(Self::in_mask(mask, 0))),
            (self.cuts[0].clone(), S::zero()),
        ];
        for i in 0..k {
            pts.push((self.points[i].clone(), one(Self::in_mask(mask, i + 1))));
            pts.push((self.cuts[i + 1].clone(), S::zero()));
        }
        pts.push((self.cuts[k].clone() + S::one(), one(Self::in_mask(mask, k + 1))));
        PiecewiseFn::through(pts).expect("increasing knots")
    }

    fn cell_sets(&self, mask: u64, lo_closed: bool, hi_closed: bool) -> RealSet<S> {
        let k = self.points.len();
        let mut ivs = Vec::new();
        for cell in 0..k + 2 {
            if !Self::in_mask(mask, cell) {
                continue;
            }
            let (lo, hi) = match cell {
                0 => (None, Some(self.cuts[0].clone())),
                c if c == k + 1 => (Some(self.cuts[k].clone()), None),
                c => (Some(self.cuts[c - 1].clone()), Some(self.cuts[c].clone())),
            };
            let iv = Interval::new(lo, lo_closed, hi, hi_closed).expect("nonempty cell");
            ivs.push(iv);
        }
        RealSet::from_intervals(ivs)
    }

    /// Open sets: unions of open cells plus open intervals on the grid.
    pub fn open_sets(&self) -> Vec<RealSet<S>> {
        let mut out: Vec<RealSet<S>> = self
            .masks()
            .into_iter()
            .map(|m| self.cell_sets(m, false, false))
            .collect();
        out.extend(self.grid_intervals(false, false));
        out
    }

    pub fn closed_sets(&self) -> Vec<RealSet<S>> {
        let mut out: Vec<RealSet<S>> = self
            .masks()
            .into_iter()
            .map(|m| self.cell_sets(m, true, true))
            .collect();
        out.extend(self.grid_intervals(true, true));
        out
    }

    fn boundary_capacity(&self, set: &RealSet<S>) -> S {
        let b = set.boundary();
        self.capacity(&self.target.event_where(|v| b.contains(v)))
    }

    /// Sets whose boundary carries no capacity under the law of `X`.
    pub fn continuity_sets(&self) -> Vec<RealSet<S>> {
        let mut out: Vec<RealSet<S>> = self
            .masks()
            .into_iter()
            .map(|m| self.cell_sets(m, false, true))
            .collect();
        for (lc, hc) in [(false, true), (true, false), (false, false), (true, true)] {
            out.extend(
                self.grid_intervals(lc, hc)
                    .into_iter()
                    .filter(|s| self.boundary_capacity(s).is_zero()),
            );
        }
        out
    }

    fn grid_intervals(&self, lo_closed: bool, hi_closed: bool) -> Vec<RealSet<S>> {
        let mut ends: Vec<Option<S>> = vec![None];
        ends.extend(self.grid().into_iter().map(Some));
        let mut out = Vec::new();
        for (i, a) in ends.iter().enumerate() {
            for b in ends[i + 1..].iter().chain(std::iter::once(&None)) {
                if a.is_none() && b.is_none() {
                    continue;
                }
                if let Ok(iv) = Interval::new(a.clone(), lo_closed, b.clone(), hi_closed) {
                    out.push(RealSet::interval(iv));
                }
            }
        }
        out
    }

    /// Bounded continuous piecewise-linear test functions.
    pub fn continuous_library(&self) -> Vec<PiecewiseFn<S>> {
        let mut out = Vec::new();
        for m in self.masks() {
            let f = self.bump(m);
            out.push(f.neg());
            out.push(f);
        }
        let grid = self.grid();
        let (lo, hi) = (grid[0].clone(), grid.last().expect("grid").clone());
        for w in grid.windows(2) {
            let down = PiecewiseFn::through(vec![(w[0].clone(), S::one()), (w[1].clone(), S::zero())])
                .expect("increasing");
            let up = PiecewiseFn::through(vec![(w[0].clone(), S::zero()), (w[1].clone(), S::one())])
                .expect("increasing");
            out.push(down);
            out.push(up);
        }
        let clamp = PiecewiseFn::through(vec![(lo.clone(), lo), (hi.clone(), hi)]).expect("increasing");
        out.push(clamp.neg());
        out.push(clamp);
        // Distinct weights on every cell.
        let k = self.points.len();
        let stair = PiecewiseFn::through(
            std::iter::once((self.cuts[0].clone() - S::one(), S::zero()))
                .chain((0..k).map(|i| (self.points[i].clone(), S::from_int(i as i64 + 1))))
                .chain(std::iter::once((self.cuts[k].clone() + S::one(), S::from_int(k as i64 + 1))))
                .collect(),
        )
        .expect("increasing");
        out.push(stair.neg());
        out.push(stair);
        out
    }

    /// Functions discontinuous only where `X` carries no capacity.
    pub fn continuity_functions(&self) -> Vec<PiecewiseFn<S>> {
        let mut out = self.continuous_library();
        let grid = self.grid();
        let clamp = PiecewiseFn::through(vec![
            (grid[0].clone(), grid[0].clone()),
            (grid.last().expect("grid").clone(), grid.last().expect("grid").clone()),
        ])
        .expect("increasing");
        for m in self.masks() {
            let step = PiecewiseFn::indicator(&self.cell_sets(m, false, true));
            out.push(step.add(&clamp));
            out.push(step.neg());
            out.push(step);
        }
        out
    }
}

fn germ_in<S: Scalar>(set: &RealSet<S>, g: &Germ<S>) -> bool {
    match g {
        Germ::PosInf => set.contains_pos_inf(),
        Germ::NegInf => set.contains_neg_inf(),
        Germ::Finite { value, side } => match side {
            Side::Exact => set.contains(value),
            Side::Above => set.contains_right(value),
            Side::Below => set.contains_left(value),
        },
    }
}

/// Result of each of the six equivalent characterizations.
#[derive(Debug, Clone, PartialEq)]
pub struct PortmanteauReport {
    pub claims: [Verdict; 6],
    /// True when all six verdicts agree.
    pub consistent: bool,
    pub probes_checked: usize,
}

enum Relation {
    Limit,
    LiminfAtLeast,
    LimsupAtMost,
}

struct ClaimRun<'a, 'm, S> {
    law: &'a LimitLaw<'m, S>,
    claim: usize,
    checked: usize,
    worst: f64,
}

impl<'a, 'm, S: Scalar> ClaimRun<'a, 'm, S> {
    fn new(law: &'a LimitLaw<'m, S>, claim: usize) -> Self {
        ClaimRun {
            law,
            claim,
            checked: 0,
            worst: 0.0,
        }
    }

    fn check(&mut self, probe: &Probe<S>, rel: Relation) -> Option<Verdict> {
        self.checked += 1;
        let t = self.law.evaluate(probe);
        let (ok, lhs) = match rel {
            Relation::Limit => (
                t.converges(),
                format!("lim E[f(X_n)] along (even, odd) = ({}, {})", render(&t.even), render(&t.odd)),
            ),
            Relation::LiminfAtLeast => (
                t.liminf() >= t.target,
                format!("liminf E[f(X_n)] = {}", render(&t.liminf())),
            ),
            Relation::LimsupAtMost => (
                t.limsup() <= t.target,
                format!("limsup E[f(X_n)] = {}", render(&t.limsup())),
            ),
        };
        self.worst = self.worst.max(t.residual());
        if ok {
            return None;
        }
        Some(Verdict::fail(
            format!("portmanteau claim ({})", self.claim),
            probe.describe(),
            lhs,
            format!("E[f(X)] = {}", render(&t.target)),
        ))
    }

    fn finish(self, failure: Option<Verdict>) -> (Verdict, usize) {
        let verdict = match (self.law.numeric, failure) {
            (None, f) => f.unwrap_or(Verdict::Holds),
            (Some(n), f) => numeric_verdict(n, self.worst, f),
        };
        (verdict, self.checked)
    }
}

/// Non-conclusive verdict for tabulated sequences.
pub(crate) fn numeric_verdict(n: u64, residual: f64, failure: Option<Verdict>) -> Verdict {
    if residual <= crate::convergence::NUMERIC_THRESHOLD {
        Verdict::NumericOnly {
            n_checked: n,
            residual,
        }
    } else {
        failure.unwrap_or(Verdict::NumericOnly {
            n_checked: n,
            residual,
        })
    }
}

fn run_claim<S: Scalar>(
    law: &LimitLaw<'_, S>,
    claim: usize,
    probes: impl IntoIterator<Item = (Probe<S>, Relation)>,
) -> (Verdict, usize) {
    let mut run = ClaimRun::new(law, claim);
    let mut failure = None;
    for (p, rel) in probes {
        if let Some(v) = run.check(&p, rel) {
            failure = Some(v);
            break;
        }
    }
    run.finish(failure)
}

/// Claim (1) only: limits of `E[f(X_n)]` for the continuous library.
pub fn distribution_claim<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
) -> Result<Verdict> {
    let law = LimitLaw::new(model, seq)?;
    Ok(claim_one(&law).0)
}

fn claim_one<S: Scalar>(law: &LimitLaw<'_, S>) -> (Verdict, usize) {
    run_claim(
        law,
        1,
        law.continuous_library()
            .into_iter()
            .map(|f| (Probe::Function(f), Relation::Limit)),
    )
}

pub fn portmanteau_audit<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
) -> Result<PortmanteauReport> {
    if seq.declared_limit().is_none() {
        return Err(Error::MissingLimit(
            "portmanteau audit needs a declared limit".into(),
        ));
    }
    let law = LimitLaw::new(model, seq)?;
    let continuous = law.continuous_library();
    let open = law.open_sets();
    let closed = law.closed_sets();
    let qs_sets = law.continuity_sets();
    let mut total = 0;
    let mut claims = Vec::with_capacity(6);

    let (v, n) = claim_one(&law);
    claims.push(v);
    total += n;

    let lsc = continuous
        .iter()
        .cloned()
        .map(|f| (Probe::Function(f), Relation::LiminfAtLeast))
        .chain(open.iter().cloned().map(|a| (Probe::indicator(a), Relation::LiminfAtLeast)))
        .chain(closed.iter().cloned().map(|f| (Probe::negated(f), Relation::LiminfAtLeast)));
    let usc = continuous
        .iter()
        .cloned()
        .map(|f| (Probe::Function(f), Relation::LimsupAtMost))
        .chain(closed.iter().cloned().map(|f| (Probe::indicator(f), Relation::LimsupAtMost)))
        .chain(open.iter().cloned().map(|a| (Probe::negated(a), Relation::LimsupAtMost)));
    let (v, n) = run_claim(&law, 2, lsc.chain(usc));
    claims.push(v);
    total += n;

    let (v, n) = run_claim(
        &law,
        3,
        law.continuity_functions()
            .into_iter()
            .map(|f| (Probe::Function(f), Relation::Limit)),
    );
    claims.push(v);
    total += n;

    let (v, n) = run_claim(
        &law,
        4,
        open.iter().cloned().flat_map(|a| {
            [
                (Probe::indicator(a.clone()), Relation::LiminfAtLeast),
                (Probe::negated(a), Relation::LimsupAtMost),
            ]
        }),
    );
    claims.push(v);
    total += n;

    let (v, n) = run_claim(
        &law,
        5,
        closed.iter().cloned().flat_map(|f| {
            [
                (Probe::indicator(f.clone()), Relation::LimsupAtMost),
                (Probe::negated(f), Relation::LiminfAtLeast),
            ]
        }),
    );
    claims.push(v);
    total += n;

    let (v, n) = run_claim(
        &law,
        6,
        qs_sets.into_iter().flat_map(|a| {
            [
                (Probe::indicator(a.clone()), Relation::Limit),
                (Probe::negated(a), Relation::Limit),
            ]
        }),
    );
    claims.push(v);
    total += n;

    let first = claims[0].holds();
    let consistent = claims.iter().all(|c| c.holds() == first)
        && claims.iter().all(|c| c.fails() == claims[0].fails());
    Ok(PortmanteauReport {
        claims: claims.try_into().expect("six claims"),
        consistent,
        probes_checked: total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfReport {
    pub verdict: Verdict,
    /// Pointwise convergence of the distribution functions off the atoms.
    pub pointwise: Verdict,
    /// Limits over unions of half-open intervals with massless endpoints.
    pub unions: Verdict,
    /// Portmanteau claim (1), for the reverse direction.
    pub claim_one: Verdict,
    /// Atoms where the distribution functions fail to converge (excluded).
    pub atom_exclusions: Vec<String>,
    pub consistent: bool,
}

pub fn df_convergence_audit<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
) -> Result<DfReport> {
    if seq.declared_limit().is_none() {
        return Err(Error::MissingLimit(
            "distribution-function audit needs a declared limit".into(),
        ));
    }
    let law = LimitLaw::new(model, seq)?;
    let mut xs = law.grid();
    xs.extend(law.target().values().iter().cloned());
    xs.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
    xs.dedup();

    let mut exclusions = Vec::new();
    let mut pointwise = ClaimRun::new(&law, 3);
    let mut point_failure = None;
    for x in &xs {
        let atom = law.capacity(&law.target().event_where(|v| v == x)).is_positive();
        let below = RealSet::closed(None, Some(x.clone())).expect("half line");
        for (probe, name) in [
            (Probe::indicator(below.clone()), "F_upper"),
            (Probe::negated(below.clone()), "F_lower"),
        ] {
            let t = law.evaluate(&probe);
            pointwise.checked += 1;
            if t.converges() {
                continue;
            }
            if atom {
                exclusions.push(format!("{name} at atom x = {}", render(x)));
                continue;
            }
            pointwise.worst = pointwise.worst.max(t.residual());
            if point_failure.is_none() {
                point_failure = Some(Verdict::fail(
                    "distribution functions converge off atoms",
                    format!("{name} at x = {}", render(x)),
                    format!("limits along (even, odd) = ({}, {})", render(&t.even), render(&t.odd)),
                    render(&t.target),
                ));
            }
        }
    }
    let (pointwise_verdict, _) = pointwise.finish(point_failure);

    let k = law.points().len();
    let finite_cells = ((1u64 << (k + 1)) - 1) ^ 1;
    let unions = law
        .masks()
        .into_iter()
        .filter(|m| m & !finite_cells == 0)
        .map(|m| law.cell_sets(m, false, true))
        .flat_map(|a| {
            [
                (Probe::indicator(a.clone()), Relation::Limit),
                (Probe::negated(a), Relation::Limit),
            ]
        });
    let (unions_verdict, _) = run_claim(&law, 2, unions);
    let (one, _) = claim_one(&law);
    let verdict = Verdict::all([pointwise_verdict.clone(), unions_verdict.clone()]);
    let consistent = verdict.holds() == one.holds() && verdict.fails() == one.fails();
    Ok(DfReport {
        verdict,
        pointwise: pointwise_verdict,
        unions: unions_verdict,
        claim_one: one,
        atom_exclusions: exclusions,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantLimitReport {
    pub verdict: Verdict,
    pub distribution: Verdict,
    /// The pointwise inequality chain at sampled `n` and every grid epsilon.
    pub chain: Verdict,
    /// Whether the right side of the chain tends to zero for every epsilon.
    pub right_side_vanishes: Verdict,
    /// Direct capacity decision, for cross-checking.
    pub capacity: Verdict,
    pub consistent: bool,
}

pub fn constant_limit_check<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    c: &S,
    params: &ModeParams,
) -> Result<ConstantLimitReport> {
    let target = seq.require_target()?;
    if let Some(v) = target.values().iter().find(|v| *v != c) {
        return Err(Error::Precondition(format!(
            "declared limit {target} is not the constant {} (value {})",
            render(c),
            render(v)
        )));
    }
    let law = LimitLaw::new(model, seq)?;
    let (distribution, _) = claim_one(&law);
    let grid = epsilon_grid(model, seq, &target, params);
    let two = S::one() + S::one();

    let last = if seq.is_tabulated_only() {
        seq.prefix_len()
    } else {
        seq.prefix_len() + 12
    };
    let mut chain = Verdict::Holds;
    'outer: for n in 1..=last {
        let xn = seq.eval_at(n)?.value;
        for eps in &grid {
            let dev = xn.map(|v| (v.clone() - c.clone()).abs());
            let lhs = model.capacity_unchecked(&dev.event_where(|v| v >= eps));
            let hi = c.clone() + eps.clone() / two.clone();
            let lo = c.clone() - eps.clone();
            let f_lower = model.lower_capacity(&xn.event_where(|v| *v <= hi))?;
            let f_upper = model.capacity_unchecked(&xn.event_where(|v| *v <= lo));
            let rhs = S::one() - f_lower + f_upper;
            if lhs > rhs {
                chain = Verdict::fail(
                    "V(|X_n - C| >= eps) <= 1 - F_lower_n(C + eps/2) + F_upper_n(C - eps)",
                    format!("n = {n}, eps = {}", render(eps)),
                    render(&lhs),
                    render(&rhs),
                );
                break 'outer;
            }
        }
    }

    let mut vanish = None;
    let mut worst = 0.0f64;
    for eps in &grid {
        let hi = RealSet::closed(None, Some(c.clone() + eps.clone() / two.clone())).expect("half line");
        let lo = RealSet::closed(None, Some(c.clone() - eps.clone())).expect("half line");
        let a = law.evaluate(&Probe::negated(hi));
        let b = law.evaluate(&Probe::indicator(lo));
        for (fl, fu, name) in [(&a.even, &b.even, "even"), (&a.odd, &b.odd, "odd")] {
            // a holds -F_lower, so the right side is 1 + a + b.
            let rhs = S::one() + fl.clone() + fu.clone();
            worst = worst.max(rhs.as_f64().abs());
            if !rhs.is_zero() && vanish.is_none() {
                vanish = Some(Verdict::fail(
                    "right side of the chain tends to 0",
                    format!("eps = {}, {name} n", render(eps)),
                    render(&rhs),
                    "0",
                ));
            }
        }
    }
    let right_side_vanishes = match law.numeric {
        Some(n) => numeric_verdict(n, worst, vanish),
        None => vanish.unwrap_or(Verdict::Holds),
    };
    let capacity = check_convergence(model, seq, &params.with_mode(Mode::Capacity))?;
    let verdict = Verdict::all([
        distribution.clone(),
        chain.clone(),
        right_side_vanishes.clone(),
    ]);
    let consistent = verdict.holds() == capacity.holds()
        && distribution.holds() == right_side_vanishes.holds()
        && !chain.fails();
    Ok(ConstantLimitReport {
        verdict,
        distribution,
        chain,
        right_side_vanishes,
        capacity,
        consistent,
    })
}
