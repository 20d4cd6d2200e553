//! Deciders for the six convergence modes and the relations between them.

mod dct;
mod inequalities;

pub use dct::{check_domination, dct_certificate, DctCertificate, DctSample};
pub use inequalities::{borel_cantelli_check, markov_bound, EventSchedule, MarkovReport};

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use crate::distribution::distribution_claim;
use crate::error::{Error, Result};
use crate::model::{CredalModel, EventSet, RandomVariable};
use crate::rate::series_converges;
use crate::scalar::{render, Rational, Scalar};
use crate::sequence::{Germ, Parity, SequenceSpec};
use crate::verdict::Verdict;

/// Residual at or below which a tabulated sequence is reported as numerically convergent.
pub const NUMERIC_THRESHOLD: f64 = 1e-9;

/// Largest exact scan performed when an index bound is only asymptotic.
pub(crate) const MAX_SCAN: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    QS,
    Capacity,
    Lp(Rational),
    Distribution,
    Complete,
    SLr(Rational),
}

impl Mode {
    pub fn validate(&self) -> Result<()> {
        match self {
            Mode::Lp(p) if *p < Rational::one() => Err(Error::InvalidParameter(format!(
                "L^p needs p >= 1, got {}",
                render(p)
            ))),
            Mode::SLr(r) if !r.is_positive() => Err(Error::InvalidParameter(format!(
                "s-L^r needs r > 0, got {}",
                render(r)
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::QS => write!(f, "q.s."),
            Mode::Capacity => write!(f, "capacity"),
            Mode::Lp(p) => write!(f, "L^{}", render(p)),
            Mode::Distribution => write!(f, "distribution"),
            Mode::Complete => write!(f, "c.c."),
            Mode::SLr(r) => write!(f, "s-L^{}", render(r)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeParams {
    pub mode: Mode,
    /// Positive and strictly decreasing.
    pub epsilon_grid: Vec<Rational>,
    pub n_max: u64,
}

impl ModeParams {
    pub fn new(mode: Mode) -> Self {
        let half = Rational::new(1.into(), 2.into());
        let mut grid = Vec::with_capacity(17);
        let mut e = Rational::one();
        for _ in 0..=16 {
            grid.push(e.clone());
            e *= half.clone();
        }
        ModeParams {
            mode,
            epsilon_grid: grid,
            n_max: 10_000,
        }
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        ModeParams {
            mode,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mode.validate()?;
        if self.epsilon_grid.is_empty() || self.epsilon_grid.iter().any(|e| !e.is_positive()) {
            return Err(Error::InvalidParameter(
                "epsilon grid must be nonempty and positive".into(),
            ));
        }
        if self.epsilon_grid.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParameter(
                "epsilon grid must be strictly decreasing".into(),
            ));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for ModeParams {
    fn default() -> Self {
        ModeParams::new(Mode::Capacity)
    }
}

fn atom_names<S: Scalar>(model: &CredalModel<S>, atoms: &EventSet) -> String {
    let labels = model.space().labels();
    let names: Vec<&str> = atoms.iter().map(|w| labels[w].as_str()).collect();
    format!("{{{}}}", names.join(", "))
}

fn deviation_germs<S: Scalar>(seq: &SequenceSpec<S>, target: &RandomVariable<S>, parity: Parity) -> Vec<Germ<S>> {
    seq.germs(parity)
        .iter()
        .enumerate()
        .map(|(w, g)| g.shifted(target.get(w)))
        .collect()
}

fn vanishes<S: Scalar>(g: &Germ<S>) -> bool {
    matches!(g, Germ::Finite { value, .. } if value.is_zero())
}

/// Non-polar atoms where `X_n - X` does not tend to zero along some parity.
fn divergent_atoms<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    target: &RandomVariable<S>,
) -> EventSet {
    let mut bad = EventSet::empty(seq.size());
    for parity in Parity::BOTH {
        for (w, g) in deviation_germs(seq, target, parity).iter().enumerate() {
            if !vanishes(g) {
                bad.insert(w);
            }
        }
    }
    bad.intersection(&model.nonpolar_atoms())
}

fn germ_text<S: Scalar>(g: &Germ<S>) -> String {
    match g {
        Germ::Finite { value, .. } => render(value),
        Germ::PosInf => "inf".into(),
        Germ::NegInf => "-inf".into(),
    }
}

/// The default epsilon grid augmented with deviations observed at small `n`
/// and the eventual deviations on non-polar atoms, with their halves.
pub fn epsilon_grid<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    target: &RandomVariable<S>,
    params: &ModeParams,
) -> Vec<S> {
    let nonpolar = model.nonpolar_atoms();
    let mut grid: Vec<S> = params.epsilon_grid.iter().map(S::from_rational).collect();
    let two = S::one() + S::one();
    let mut extra = Vec::new();
    for n in 1..=4 {
        if let Ok(e) = seq.eval_at(n) {
            for w in nonpolar.iter() {
                extra.push((e.value.get(w).clone() - target.get(w).clone()).abs());
            }
        }
    }
    if !seq.is_tabulated_only() {
        for parity in Parity::BOTH {
            for (w, g) in deviation_germs(seq, target, parity).iter().enumerate() {
                if let (true, Some(v)) = (nonpolar.contains(w), g.finite_value()) {
                    extra.push(v.abs());
                }
            }
        }
    }
    for v in extra {
        if v.is_positive() {
            grid.push(v.clone() / two.clone());
            grid.push(v);
        }
    }
    grid.sort_by(|a, b| b.partial_cmp(a).expect("ordered"));
    grid.dedup();
    grid
}

pub fn check_convergence<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    params: &ModeParams,
) -> Result<Verdict> {
    params.validate()?;
    model.check(seq.base())?;
    let target = seq.require_target()?;
    model.check(&target)?;
    if seq.is_tabulated_only() {
        return numeric_mode(model, seq, &target, params);
    }
    match &params.mode {
        Mode::QS => Ok(decide_qs(model, seq, &target)),
        Mode::Capacity => Ok(decide_capacity(model, seq, &target, params)),
        Mode::Lp(p) => Ok(decide_lp(model, seq, &target, p)),
        Mode::Distribution => distribution_claim(model, seq),
        Mode::Complete => decide_complete(model, seq, &target, params),
        Mode::SLr(r) => decide_slr(model, seq, &target, r),
    }
}

fn decide_qs<S: Scalar>(model: &CredalModel<S>, seq: &SequenceSpec<S>, target: &RandomVariable<S>) -> Verdict {
    let info = seq.limit_rv();
    let mut bad = info.failing.clone();
    for w in 0..seq.size() {
        if !info.failing.contains(w) && info.candidate.get(w) != target.get(w) {
            bad.insert(w);
        }
    }
    let v = model.capacity_unchecked(&bad);
    if v.is_zero() {
        return Verdict::Holds;
    }
    let nonpolar = bad.intersection(&model.nonpolar_atoms());
    Verdict::fail(
        "V(X_n does not converge to X) = 0",
        format!("non-convergence atoms {}", atom_names(model, &nonpolar)),
        render(&v),
        "0",
    )
}

fn decide_capacity<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    target: &RandomVariable<S>,
    params: &ModeParams,
) -> Verdict {
    let grid = epsilon_grid(model, seq, target, params);
    for parity in Parity::BOTH {
        let germs = deviation_germs(seq, target, parity);
        for eps in &grid {
            let mut event = EventSet::empty(seq.size());
            for (w, g) in germs.iter().enumerate() {
                if g.eventually_at_least(eps) {
                    event.insert(w);
                }
            }
            let v = model.capacity_unchecked(&event);
            if !v.is_zero() {
                return Verdict::fail(
                    "lim V(|X_n - X| >= eps) = 0",
                    format!(
                        "eps = {}, {} n, atoms {}",
                        render(eps),
                        parity_name(parity),
                        atom_names(model, &event.intersection(&model.nonpolar_atoms()))
                    ),
                    render(&v),
                    "0",
                );
            }
        }
    }
    Verdict::Holds
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

fn decide_lp<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    target: &RandomVariable<S>,
    p: &Rational,
) -> Verdict {
    let info = seq.limit_rv();
    let nonpolar = model.nonpolar_atoms();
    let mut bad = info.failing.intersection(&nonpolar);
    for w in nonpolar.iter() {
        if info.candidate.get(w) != target.get(w) {
            bad.insert(w);
        }
    }
    if bad.is_empty() {
        return Verdict::Holds;
    }
    let mut limits = Vec::new();
    for parity in Parity::BOTH {
        let germs = deviation_germs(seq, target, parity);
        let lim = if germs.iter().all(|g| g.finite_value().is_some()) {
            let dev = RandomVariable::new(
                germs
                    .iter()
                    .map(|g| g.finite_value().expect("finite").abs_pow(p).0)
                    .collect(),
            );
            render(&model.upper_unchecked(&dev))
        } else {
            "inf".into()
        };
        limits.push(format!("{} n: {lim}", parity_name(parity)));
    }
    Verdict::fail(
        format!("E[|X_n - X|^{}] -> 0", render(p)),
        format!("atoms {}", atom_names(model, &bad)),
        limits.join(", "),
        "0",
    )
}

fn decide_complete<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    target: &RandomVariable<S>,
    params: &ModeParams,
) -> Result<Verdict> {
    let bad = divergent_atoms(model, seq, target);
    if let Some(w) = bad.iter().next() {
        let g = seq.germ(w, Parity::Even).shifted(target.get(w));
        let g = if vanishes(&g) {
            seq.germ(w, Parity::Odd).shifted(target.get(w))
        } else {
            g
        };
        let eps = match g.finite_value() {
            Some(v) => v.abs() / (S::one() + S::one()),
            None => S::one(),
        };
        let single = EventSet::new(seq.size(), [w])?;
        return Ok(Verdict::fail(
            "sum V(|X_n - X| >= eps) < inf",
            format!(
                "eps = {}, atom {} with eventual deviation {}",
                render(&eps),
                atom_names(model, &single),
                germ_text(&g)
            ),
            format!("terms >= {} infinitely often", render(&model.capacity_unchecked(&single))),
            "summable",
        ));
    }
    // Deviations vanish on every non-polar atom: the summand is zero from the
    // capacity index on, so the series is a finite sum.
    let nonpolar = model.nonpolar_atoms();
    let smallest = params
        .epsilon_grid
        .last()
        .map(S::from_rational)
        .expect("nonempty grid");
    match seq.capacity_index(&nonpolar, smallest.as_f64()) {
        Ok(_) | Err(Error::TooLarge(_)) => Ok(Verdict::Holds),
        Err(e) => Err(e),
    }
}

fn decide_slr<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    target: &RandomVariable<S>,
    r: &Rational,
) -> Result<Verdict> {
    let bad = divergent_atoms(model, seq, target);
    if !bad.is_empty() {
        return Ok(Verdict::fail(
            format!("sum E[|X_n - X|^{}] < inf", render(r)),
            format!("atoms {} where X_n - X does not vanish", atom_names(model, &bad)),
            "terms bounded away from 0",
            "summable",
        ));
    }
    // Per atom and parity the deviation behaves like |c| |a_n| for the slowest
    // surviving rate, and E is squeezed between V({w}) |D_n(w)|^r and the sum
    // over atoms.
    for w in model.nonpolar_atoms().iter() {
        for parity in Parity::BOTH {
            let Some((rate, coef)) = seq.dominant_decay(w, parity) else {
                continue;
            };
            if !series_converges(&rate, r)? {
                let factors: Vec<String> = seq
                    .terms()
                    .iter()
                    .filter(|t| t.rate.decay_key().is_some())
                    .map(|t| {
                        let d = t.direction.map(|v| v.abs_pow(r).0);
                        format!("E[|D|^{}] = {} for {}", render(r), render(&model.upper_unchecked(&d)), t.rate)
                    })
                    .collect();
                let single = EventSet::new(seq.size(), [w])?;
                return Ok(Verdict::fail(
                    format!("sum E[|X_n - X|^{}] < inf", render(r)),
                    format!(
                        "atom {}, {} n: |X_n - X| ~ {} * {}; {}",
                        atom_names(model, &single),
                        parity_name(parity),
                        render(&coef.abs()),
                        rate,
                        factors.join("; ")
                    ),
                    format!(
                        "terms >= {} * |{}|^{} * ({})^{}",
                        render(&model.capacity_unchecked(&single)),
                        render(&coef),
                        render(r),
                        rate,
                        render(r)
                    ),
                    "divergent",
                ));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Tabulated sequences: compare the last available term with the limit.
fn numeric_mode<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    target: &RandomVariable<S>,
    params: &ModeParams,
) -> Result<Verdict> {
    let n = seq.prefix_len().min(params.n_max);
    let xn = seq.eval_at(n)?.value;
    let dev = xn.sub(target)?.abs();
    let nonpolar = model.nonpolar_atoms();
    let sup = nonpolar
        .iter()
        .map(|w| dev.get(w).as_f64())
        .fold(0.0f64, f64::max);
    let residual = match &params.mode {
        Mode::QS | Mode::Capacity | Mode::Distribution => sup,
        Mode::Lp(p) | Mode::SLr(p) => model.upper_unchecked(&dev.map(|v| v.abs_pow(p).0)).as_f64(),
        Mode::Complete => {
            let eps = S::from_rational(params.epsilon_grid.last().expect("nonempty grid"));
            model.capacity_unchecked(&dev.event_where(|v| *v >= eps)).as_f64()
        }
    };
    if residual <= NUMERIC_THRESHOLD {
        return Ok(Verdict::NumericOnly {
            n_checked: n,
            residual,
        });
    }
    Ok(Verdict::fail(
        format!("{} convergence of a tabulated sequence", params.mode),
        format!("n = {n}"),
        format!("residual {residual:e}"),
        format!("<= {NUMERIC_THRESHOLD:e}"),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arrow {
    pub from: Mode,
    pub to: Mode,
    /// False only when the antecedent holds and the consequent fails.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplicationReport {
    pub verdicts: Vec<(Mode, Verdict)>,
    pub arrows: Vec<Arrow>,
}

impl ImplicationReport {
    pub fn consistent(&self) -> bool {
        self.arrows.iter().all(|a| a.consistent)
    }

    pub fn verdict(&self, mode: &Mode) -> Option<&Verdict> {
        self.verdicts.iter().find(|(m, _)| m == mode).map(|(_, v)| v)
    }

    /// Arrows whose antecedent holds while the consequent fails.
    pub fn violations(&self) -> Vec<&Arrow> {
        self.arrows.iter().filter(|a| !a.consistent).collect()
    }
}

pub fn implication_audit<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    r: &Rational,
    p: &Rational,
    params: &ModeParams,
) -> Result<ImplicationReport> {
    let modes = [
        Mode::SLr(r.clone()),
        Mode::Complete,
        Mode::QS,
        Mode::Capacity,
        Mode::Distribution,
        Mode::Lp(p.clone()),
    ];
    let mut verdicts = Vec::with_capacity(modes.len());
    for m in modes {
        let v = check_convergence(model, seq, &params.with_mode(m.clone()))?;
        verdicts.push((m, v));
    }
    let pairs = [(0, 1), (1, 2), (2, 3), (3, 4), (5, 3)];
    let arrows = pairs
        .iter()
        .map(|&(a, b)| Arrow {
            from: verdicts[a].0.clone(),
            to: verdicts[b].0.clone(),
            consistent: !(verdicts[a].1.holds() && verdicts[b].1.fails()),
        })
        .collect();
    Ok(ImplicationReport { verdicts, arrows })
}

/// Index maps `k -> n_k` used to probe the subsequence principle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsequenceProbe {
    Identity,
    Evens,
    Odds,
    Squares,
    /// `k -> a k + b` with `a >= 1`.
    Affine { a: u64, b: u64 },
}

impl SubsequenceProbe {
    pub fn defaults() -> Vec<SubsequenceProbe> {
        vec![
            SubsequenceProbe::Identity,
            SubsequenceProbe::Evens,
            SubsequenceProbe::Odds,
            SubsequenceProbe::Squares,
        ]
    }

    pub fn index(&self, k: u64) -> u64 {
        match self {
            SubsequenceProbe::Identity => k,
            SubsequenceProbe::Evens => 2 * k,
            SubsequenceProbe::Odds => 2 * k - 1,
            SubsequenceProbe::Squares => k * k,
            SubsequenceProbe::Affine { a, b } => a * k + b,
        }
    }

    /// Parity classes the probe visits infinitely often.
    pub fn parities(&self) -> Vec<Parity> {
        match self {
            SubsequenceProbe::Evens => vec![Parity::Even],
            SubsequenceProbe::Odds => vec![Parity::Odd],
            SubsequenceProbe::Affine { a, b } if a % 2 == 0 => vec![Parity::of(*b)],
            _ => Parity::BOTH.to_vec(),
        }
    }
}

impl fmt::Display for SubsequenceProbe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsequenceProbe::Identity => write!(f, "n_k = k"),
            SubsequenceProbe::Evens => write!(f, "n_k = 2k"),
            SubsequenceProbe::Odds => write!(f, "n_k = 2k - 1"),
            SubsequenceProbe::Squares => write!(f, "n_k = k^2"),
            SubsequenceProbe::Affine { a, b } => write!(f, "n_k = {a}k + {b}"),
        }
    }
}

pub fn subsequence_principle<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    probes: &[SubsequenceProbe],
    params: &ModeParams,
) -> Result<Verdict> {
    if probes.is_empty() {
        return Err(Error::InvalidParameter("probe list is empty".into()));
    }
    if let Some(p) = probes.iter().find(|p| matches!(p, SubsequenceProbe::Affine { a: 0, .. })) {
        return Err(Error::InvalidParameter(format!("probe {p} is not increasing")));
    }
    let capacity = check_convergence(model, seq, &params.with_mode(Mode::Capacity))?;
    if seq.is_tabulated_only() {
        return Ok(capacity);
    }
    let target = seq.require_target()?;
    let nonpolar = model.nonpolar_atoms();
    // Per parity, the first non-polar atom whose deviation does not vanish.
    let bad_atom = |parity: Parity| {
        deviation_germs(seq, &target, parity)
            .iter()
            .enumerate()
            .find(|(w, g)| nonpolar.contains(*w) && !vanishes(g))
            .map(|(w, g)| (w, germ_text(g)))
    };
    let blocked = |probe: &SubsequenceProbe| {
        let found: Vec<_> = probe.parities().into_iter().map(|p| (p, bad_atom(p))).collect();
        if found.iter().all(|(_, b)| b.is_some()) {
            Some(found)
        } else {
            None
        }
    };
    if capacity.holds() {
        // Each probe converges q.s. along itself, so it is its own sub-subsequence.
        for probe in probes {
            if let Some(found) = blocked(probe) {
                return Ok(Verdict::fail(
                    "every subsequence has a q.s. convergent sub-subsequence",
                    format!("probe {probe}"),
                    describe_blocked(model, &found),
                    "deviation -> 0 on non-polar atoms",
                ));
            }
        }
        return Ok(Verdict::Holds);
    }
    let extra = [SubsequenceProbe::Evens, SubsequenceProbe::Odds];
    for probe in probes.iter().chain(extra.iter()) {
        if let Some(found) = blocked(probe) {
            return Ok(Verdict::fail(
                "every subsequence has a q.s. convergent sub-subsequence",
                format!("probe {probe}"),
                describe_blocked(model, &found),
                "deviation -> 0 on non-polar atoms",
            ));
        }
    }
    // Capacity fails only through a non-vanishing deviation on some parity,
    // which one of the parity probes always exhibits.
    Ok(capacity)
}

fn describe_blocked<S: Scalar>(model: &CredalModel<S>, found: &[(Parity, Option<(usize, String)>)]) -> String {
    let labels = model.space().labels();
    found
        .iter()
        .filter_map(|(p, b)| {
            b.as_ref().map(|(w, dev)| {
                format!("{} n: deviation at {} tends to {dev}", parity_name(*p), labels[*w])
            })
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Continuous maps with an explicit modulus of continuity on bounded sets.
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousMap {
    Identity,
    /// `x -> a x + b`.
    Affine { a: Rational, b: Rational },
    Square,
    Abs,
    /// Coefficients in increasing degree.
    Polynomial(Vec<Rational>),
}

impl ContinuousMap {
    pub fn apply<S: Scalar>(&self, x: &S) -> S {
        match self {
            ContinuousMap::Identity => x.clone(),
            ContinuousMap::Affine { a, b } => S::from_rational(a) * x.clone() + S::from_rational(b),
            ContinuousMap::Square => x.clone() * x.clone(),
            ContinuousMap::Abs => x.abs(),
            ContinuousMap::Polynomial(c) => c
                .iter()
                .rev()
                .fold(S::zero(), |acc, k| acc * x.clone() + S::from_rational(k)),
        }
    }

    /// Lipschitz constant on `[-radius, radius]`.
    pub fn lipschitz(&self, radius: &Rational) -> Rational {
        match self {
            ContinuousMap::Identity | ContinuousMap::Abs => Rational::one(),
            ContinuousMap::Affine { a, .. } => a.abs(),
            ContinuousMap::Square => radius.clone() * Rational::from_integer(2.into()),
            ContinuousMap::Polynomial(c) => {
                let mut total = Rational::zero();
                let mut power = Rational::one();
                for (k, coef) in c.iter().enumerate().skip(1) {
                    total += coef.abs() * Rational::from_integer((k as i64).into()) * power.clone();
                    power *= radius.clone();
                }
                total
            }
        }
    }
}

impl fmt::Display for ContinuousMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuousMap::Identity => write!(f, "x"),
            ContinuousMap::Affine { a, b } => write!(f, "{} x + {}", render(a), render(b)),
            ContinuousMap::Square => write!(f, "x^2"),
            ContinuousMap::Abs => write!(f, "|x|"),
            ContinuousMap::Polynomial(c) => {
                let parts: Vec<String> = c
                    .iter()
                    .enumerate()
                    .map(|(k, v)| format!("{} x^{k}", render(v)))
                    .collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingReport<S> {
    pub verdict: Verdict,
    pub lipschitz: Rational,
    /// For each epsilon, the index beyond which `V(|f(X_n) - f(X)| >= eps) = 0`.
    pub indices: Vec<(S, BigUint)>,
}

pub fn continuous_mapping_check<S: Scalar>(
    model: &CredalModel<S>,
    seq: &SequenceSpec<S>,
    f: &ContinuousMap,
    params: &ModeParams,
) -> Result<MappingReport<S>> {
    let capacity = check_convergence(model, seq, &params.with_mode(Mode::Capacity))?;
    if capacity.fails() {
        return Err(Error::Precondition(
            "sequence does not converge in capacity".into(),
        ));
    }
    let target = seq.require_target()?;
    let image_target = target.map(|v| f.apply(v));
    let nonpolar = model.nonpolar_atoms();
    let radius = nonpolar
        .iter()
        .map(|w| target.get(w).abs().to_rational())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
        + Rational::one();
    let lip = f.lipschitz(&radius);
    let grid = epsilon_grid(model, seq, &target, params);
    if let Verdict::NumericOnly { n_checked, .. } = capacity {
        let xn = seq.eval_at(n_checked)?.value.map(|v| f.apply(v));
        let residual = nonpolar
            .iter()
            .map(|w| (xn.get(w).clone() - image_target.get(w).clone()).abs().as_f64())
            .fold(0.0f64, f64::max);
        let verdict = if residual <= NUMERIC_THRESHOLD {
            Verdict::NumericOnly { n_checked, residual }
        } else {
            Verdict::fail(
                "f(X_n) -> f(X) in capacity",
                format!("f = {f}, n = {n_checked}"),
                format!("residual {residual:e}"),
                format!("<= {NUMERIC_THRESHOLD:e}"),
            )
        };
        return Ok(MappingReport {
            verdict,
            lipschitz: lip,
            indices: Vec::new(),
        });
    }
    let mut indices = Vec::with_capacity(grid.len());
    for eps in &grid {
        // |X_n - X| < delta <= 1 keeps X_n inside the radius, where f is L-Lipschitz.
        let delta = if lip.is_zero() {
            S::one()
        } else {
            let d = eps.clone() / S::from_rational(&lip);
            if d < S::one() {
                d
            } else {
                S::one()
            }
        };
        let n0 = match seq.capacity_index(&nonpolar, delta.as_f64()) {
            Ok(n0) => n0,
            // Beyond the representable range; the germ verdict already covers it.
            Err(Error::TooLarge(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut n = n0.clone();
        for _ in 0..8 {
            let e = seq.eval_big(&n)?;
            if e.is_exact() {
                let image = e.value.map(|v| f.apply(v));
                let dev = image.sub(&image_target)?.abs();
                let v = model.capacity_unchecked(&dev.event_where(|d| d >= eps));
                if !v.is_zero() {
                    return Ok(MappingReport {
                        verdict: Verdict::fail(
                            "V(|f(X_n) - f(X)| >= eps) = 0 beyond the modulus index",
                            format!("f = {f}, eps = {}, n = {n}", render(eps)),
                            render(&v),
                            "0",
                        ),
                        lipschitz: lip,
                        indices,
                    });
                }
            }
            n += 1u32;
        }
        indices.push((eps.clone(), n0));
    }
    Ok(MappingReport {
        verdict: Verdict::Holds,
        lipschitz: lip,
        indices,
    })
}
