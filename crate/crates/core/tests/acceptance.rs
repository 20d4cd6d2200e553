//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Two criteria are expected to print FAIL because their stated answers are
//! wrong; the run still exits successfully as long as each failure is exactly
//! the documented one.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sublinear::axioms::verify_axioms;
use sublinear::convergence::{check_domination, dct_certificate, implication_audit, markov_bound, Mode, ModeParams};
use sublinear::distribution::{
    constant_limit_check, df_convergence_audit, lower_continuity_claim, pair_properties_check, portmanteau_audit,
    two_monotone_check,
};
use sublinear::generate::{generate_random_scenario, random_model, GenSize};
use sublinear::report::{run_report, RunOptions, EXIT_VIOLATION};
use sublinear::scalar::{int, ratio, rational_to_f64};
use sublinear::{
    check_convergence, Check, Error, ExactModel, ExactSequence, ExactVariable, RateSequence, Rational, Scenario,
    Verdict,
};

use common::known::{known_answers, STATED_DEFECTS};
use common::oracle::{self, Credal, Q};

struct Outcome {
    pass: bool,
    detail: String,
    /// A FAIL that matches a documented defect in the stated answers.
    expected_failure: bool,
}

impl Outcome {
    fn pass(detail: impl Into<String>) -> Self {
        Outcome {
            pass: true,
            detail: detail.into(),
            expected_failure: false,
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Outcome {
            pass: false,
            detail: detail.into(),
            expected_failure: false,
        }
    }

    fn known_fail(detail: impl Into<String>) -> Self {
        Outcome {
            pass: false,
            detail: detail.into(),
            expected_failure: true,
        }
    }
}

fn credal(m: &ExactModel) -> Credal {
    Credal {
        rows: m.measures().iter().map(|p| p.weights().to_vec()).collect(),
    }
}

fn random_rv(rng: &mut ChaCha8Rng, n: usize) -> ExactVariable {
    ExactVariable::new(
        (0..n)
            .map(|_| ratio(rng.gen_range(-24..=24), rng.gen_range(1..=4)))
            .collect(),
    )
}

fn scenarios(count: u64) -> Vec<(u64, Scenario)> {
    (0..count)
        .map(|seed| (seed, generate_random_scenario(seed, GenSize::default()).expect("generator")))
        .collect()
}

fn sequence(s: &Scenario) -> &ExactSequence {
    &s.sequences[0].1
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut samples = 0usize;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, _) = random_model(&mut rng, GenSize::default()).unwrap();
        let n = m.size();
        let mut vars: Vec<ExactVariable> = (0..4).map(|_| random_rv(&mut rng, n)).collect();
        vars.push(ExactVariable::constant(n, ratio(rng.gen_range(-5..=5), 2)));
        let pairs: Vec<_> = vars
            .iter()
            .flat_map(|a| vars.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        samples += pairs.len();
        let lambdas = [int(0), ratio(1, 3), int(1), ratio(5, 2), int(7)];
        let report = verify_axioms(&m, &pairs, &lambdas).unwrap();
        if !report.verdict.holds() {
            return Outcome::fail(format!("seed {seed}: {:?}", report.verdict));
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("1000 models, {samples} sample pairs, {:.1} s", elapsed.as_secs_f64());
    if elapsed < Duration::from_secs(60) {
        Outcome::pass(detail)
    } else {
        Outcome::fail(format!("{detail} exceeds the 60 s budget"))
    }
}

fn criterion_2() -> Outcome {
    let mut triples = 0usize;
    for seed in 0..2000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1 << 32 | seed);
        let (m, _) = random_model(&mut rng, GenSize::default()).unwrap();
        let c = credal(&m);
        for _ in 0..5 {
            let x = random_rv(&mut rng, m.size());
            let lam = ratio(rng.gen_range(1..=40), rng.gen_range(1..=8));
            let p = rng.gen_range(1..=3);
            let rep = markov_bound(&m, &x, &lam, &int(p)).unwrap();
            // Independent recomputation from the weight rows.
            let lhs = c.dist_cap(x.values(), |v| v.abs() >= lam);
            let moment = c.upper(&oracle::powi(&oracle::abs(x.values()), p as i32));
            let rhs: Q = moment / num_traits::pow(lam.clone(), p as usize);
            if !rep.exact || rep.lhs != lhs || rep.rhs != rhs || !rep.verdict.holds() || lhs > rhs {
                return Outcome::fail(format!("seed {seed}: lhs {} rhs {}", rep.lhs, rep.rhs));
            }
            triples += 1;
        }
    }
    Outcome::pass(format!("{triples} triples, exact comparison"))
}

fn criterion_3(fuzz: &[(u64, Scenario)]) -> Outcome {
    let mut families = BTreeSet::new();
    let mut audits = 0usize;
    for (seed, s) in fuzz {
        let seq = sequence(s);
        for t in seq.terms() {
            families.insert(t.rate.family());
            families.insert(t.rate.base().family());
        }
        for r in [int(1), int(2)] {
            for p in [int(1), int(2)] {
                let rep = implication_audit(&s.model, seq, &r, &p, &ModeParams::default()).unwrap();
                if let Some(a) = rep.violations().first() {
                    return Outcome::fail(format!("seed {seed}: arrow {} => {} violated", a.from, a.to));
                }
                audits += 1;
            }
        }
        let mut only = s.clone();
        only.checks = vec![Check::Implications {
            sequence: "S".into(),
            r: int(1),
            p: int(1),
        }];
        if run_report(&only, &RunOptions::default()).exit_code == EXIT_VIOLATION {
            return Outcome::fail(format!("seed {seed}: exit-code trap fired"));
        }
    }
    let expected: BTreeSet<&str> = ["alternating", "constant", "geometric", "growth", "logpow", "power"].into();
    if !expected.is_subset(&families) {
        return Outcome::fail(format!("rate families covered: {families:?}"));
    }
    Outcome::pass(format!("{} scenarios, {audits} audits, families {families:?}", fuzz.len()))
}

fn criterion_4(fuzz: &[(u64, Scenario)]) -> Outcome {
    let mut certified = 0usize;
    let mut samples = 0usize;
    for (seed, s) in fuzz {
        let seq = sequence(s);
        let Some(y) = seq.triangle_dominator() else { continue };
        let cap = check_convergence(&s.model, seq, &ModeParams::new(Mode::Capacity)).unwrap();
        if !cap.holds() {
            continue;
        }
        let c = credal(&s.model);
        let x = seq.require_target().unwrap();
        for eps in [ratio(1, 10), ratio(1, 1000)] {
            let cert = match dct_certificate(&s.model, seq, &y, &eps, &ModeParams::default()) {
                Ok(cert) => cert,
                Err(e) => return Outcome::fail(format!("seed {seed}, eps {eps}: {e}")),
            };
            if !cert.verdict.holds() || !(cert.analytic_tail < rational_to_f64(&eps)) {
                return Outcome::fail(format!("seed {seed}, eps {eps}: {:?}", cert.verdict));
            }
            for sample in &cert.samples {
                let xn = seq.eval_big(&sample.n).unwrap();
                let dist = c.upper(&oracle::abs(&oracle::sub(xn.value.values(), x.values())));
                let slack = Rational::from_float(xn.err).unwrap();
                let chain = sample.bound();
                if dist != sample.distance || chain < dist || !(dist + &slack < eps) || !(chain + &slack < eps) {
                    return Outcome::fail(format!("seed {seed}, eps {eps}, n {}", sample.n));
                }
                samples += 1;
            }
            certified += 1;
        }
    }
    if certified == 0 {
        return Outcome::fail("no dominated capacity-convergent scenario was drawn");
    }
    Outcome::pass(format!("{certified} certificates, {samples} re-verified samples"))
}

fn criterion_5(fuzz: &[(u64, Scenario)]) -> Outcome {
    let mut checked = 0usize;
    let mut constant = 0usize;
    for (seed, s) in fuzz.iter().take(500) {
        let seq = sequence(s);
        let pm = portmanteau_audit(&s.model, seq).unwrap();
        let first = pm.claims[0].label();
        if pm.claims.iter().any(|c| c.label() != first) || !pm.consistent {
            let labels: Vec<_> = pm.claims.iter().map(Verdict::label).collect();
            return Outcome::fail(format!("seed {seed}: claims {labels:?}"));
        }
        let df = df_convergence_audit(&s.model, seq).unwrap();
        if df.verdict.label() != first || !df.consistent {
            return Outcome::fail(format!("seed {seed}: df {} vs claim {first}", df.verdict.label()));
        }
        let limit = seq.declared_limit().unwrap();
        if limit.is_constant() {
            let cl = constant_limit_check(&s.model, seq, limit.get(0), &ModeParams::default()).unwrap();
            let cap = check_convergence(&s.model, seq, &ModeParams::new(Mode::Capacity)).unwrap();
            if cl.verdict.label() != first || cap.label() != first || !cl.consistent {
                return Outcome::fail(format!(
                    "seed {seed}: constant limit {} capacity {} claims {first}",
                    cl.verdict.label(),
                    cap.label()
                ));
            }
            constant += 1;
        }
        checked += 1;
    }
    Outcome::pass(format!("{checked} scenarios with declared limits, {constant} constant"))
}

fn criterion_6(fuzz: &[(u64, Scenario)]) -> Outcome {
    let mut variables = 0usize;
    let mut literal_failures = Vec::new();
    for (seed, s) in fuzz {
        for (name, x) in &s.variables {
            let v = pair_properties_check(&s.model, x).unwrap();
            if !v.holds() {
                return Outcome::fail(format!("seed {seed}, {name}: {v:?}"));
            }
            if lower_continuity_claim(&s.model, x).unwrap().fails() {
                literal_failures.push((*seed, name.clone()));
            }
            variables += 1;
        }
    }
    let worked = known_answers();
    let pairs_ok = worked
        .iter()
        .filter(|k| k.name.starts_with("pair "))
        .all(|k| k.library == k.stated && k.oracle == k.stated);
    if !pairs_ok {
        return Outcome::fail("worked distribution pairs differ from the stated step functions");
    }
    // The two-point model {delta_a, delta_b} with X = (0, 1): the smallest
    // mass at x = 1 is 0, yet F_lower jumps from 0 to 1 there.
    let two = ExactModel::from_rows(vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
    let counterexample = lower_continuity_claim(&two, &ExactVariable::new(vec![int(0), int(1)]))
        .unwrap()
        .fails();
    let base = format!(
        "{variables} fuzzed X: ordering, bounds, monotonicity, right-continuity, limits and massless-point continuity hold; worked pairs match"
    );
    if literal_failures.is_empty() && !counterexample {
        return Outcome::pass(base);
    }
    if counterexample {
        return Outcome::known_fail(format!(
            "{base}; the stated lower-continuity clause (zero lower mass implies F_lower continuous) fails on {} fuzzed X and on the two-point model at x = 1",
            literal_failures.len()
        ));
    }
    Outcome::fail(format!("{base}; unexpected lower-continuity failures {literal_failures:?}"))
}

fn criterion_7() -> Outcome {
    let rows = known_answers();
    let lib_off: Vec<_> = rows.iter().filter(|k| !k.library_matches_oracle()).map(|k| k.name).collect();
    if !lib_off.is_empty() {
        return Outcome::fail(format!("library disagrees with the oracle on {lib_off:?}"));
    }
    let stated_off: Vec<_> = rows.iter().filter(|k| !k.oracle_matches_stated()).collect();
    if stated_off.is_empty() {
        return Outcome::pass(format!("{} examples reproduced by oracle and library", rows.len()));
    }
    let names: Vec<&str> = stated_off.iter().map(|k| k.name).collect();
    let detail = format!(
        "{} examples, library equals oracle on all; oracle contradicts the stated answer on {}",
        rows.len(),
        stated_off
            .iter()
            .map(|k| format!("{} (stated {}, enumerated {})", k.name, k.stated, k.oracle))
            .collect::<Vec<_>>()
            .join("; ")
    );
    if names == STATED_DEFECTS {
        Outcome::known_fail(detail)
    } else {
        Outcome::fail(detail)
    }
}

fn criterion_8() -> Outcome {
    let m = ExactModel::from_rows(vec![
        vec![ratio(1, 2), ratio(1, 2), int(0)],
        vec![int(0), ratio(1, 2), ratio(1, 2)],
    ])
    .unwrap();
    let x = ExactVariable::new(vec![int(1), int(2), int(4)]);
    let d = ExactVariable::new(vec![int(1), int(-2), int(3)]);
    let alt = ExactSequence::new(x.clone())
        .with_term(RateSequence::alternating(RateSequence::constant(int(1))).unwrap(), d.clone())
        .unwrap()
        .with_limit(x.clone())
        .unwrap();
    let mut notes = Vec::new();
    for mode in [Mode::QS, Mode::Capacity, Mode::Distribution] {
        match check_convergence(&m, &alt, &ModeParams::new(mode.clone())).unwrap() {
            Verdict::Fails(w) => notes.push(format!("{mode}: {}", w.input)),
            other => return Outcome::fail(format!("alternating constant under {mode}: {other:?}")),
        }
    }
    if !notes[0].contains("{0, 1, 2}") && !notes[0].contains("{w0, w1, w2}") {
        return Outcome::fail(format!("q.s. witness atoms: {}", notes[0]));
    }
    let two = ExactModel::from_rows(vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
    match two_monotone_check(&two, &ExactVariable::new(vec![int(0), int(1)])).unwrap() {
        Verdict::Fails(w) if w.input == "A = {0}, B = {1}" => notes.push(format!("2-monotone: {}", w.input)),
        other => return Outcome::fail(format!("two-point 2-monotone: {other:?}")),
    }
    let spike = ExactSequence::new(ExactVariable::new(vec![int(0), int(0), int(0)]))
        .with_term(RateSequence::growth(int(1)).unwrap(), ExactVariable::new(vec![int(1), int(0), int(0)]))
        .unwrap();
    let y = ExactVariable::new(vec![int(1), int(0), int(0)]);
    match check_domination(&spike, &y) {
        Err(Error::DominationViolated { n, .. }) => notes.push(format!("domination violated at n = {n}")),
        other => return Outcome::fail(format!("non-dominated sequence: {other:?}")),
    }
    match dct_certificate(&m, &spike, &y, &ratio(1, 10), &ModeParams::default()) {
        Err(Error::DominationViolated { .. }) => {}
        other => return Outcome::fail(format!("certificate on non-dominated sequence: {other:?}")),
    }
    Outcome::pass(notes.join("; "))
}

fn main() {
    let fuzz = scenarios(1000);
    let runs: Vec<(u32, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(|| criterion_3(&fuzz))),
        (4, Box::new(|| criterion_4(&fuzz))),
        (5, Box::new(|| criterion_5(&fuzz))),
        (6, Box::new(|| criterion_6(&fuzz))),
        (7, Box::new(criterion_7)),
        (8, Box::new(criterion_8)),
    ];
    let mut unexpected = 0;
    for (k, run) in runs {
        let t = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if o.expected_failure { " [documented defect in the stated answer]" } else { "" };
        println!("criterion {k}: {status}{note} ({:.1} s) {}", t.elapsed().as_secs_f64(), o.detail);
        if !o.pass && !o.expected_failure {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed unexpectedly");
        std::process::exit(1);
    }
}
