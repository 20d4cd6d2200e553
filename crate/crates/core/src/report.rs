//! Runs a scenario's checks and assembles a deterministic JSON report.

use serde_json::{json, Value};

use crate::axioms::{verify_axioms, verify_functional};
use crate::convergence::{
    borel_cantelli_check, check_convergence, continuous_mapping_check, dct_certificate, implication_audit,
    markov_bound, subsequence_principle, Mode, ModeParams, SubsequenceProbe,
};
use crate::distribution::{
    capacity_atoms, constant_limit_check, df_convergence_audit, distribution_capacity, distribution_pair,
    lower_continuity_claim, pair_properties_check, portmanteau_audit, two_monotone_check, RealSet,
};
use crate::error::{Error, Result};
use crate::model::RandomVariable;
use crate::scalar::{decimal, render_rational, Rational};
use crate::scenario::{mode_params, parse_map, parse_probe, Check, Scenario};
use crate::spaces::{lb_membership, lp_seminorm, monotone_convergence_check, uniform_integrability, ModulusValue, UiFamily};
use crate::verdict::Verdict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    /// Restricts the run to checks of these kinds.
    pub only: Option<Vec<String>>,
    /// Test hook: also audit a deliberately broken functional.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub document: Value,
    pub exit_code: i32,
    /// `(file name, contents)` for every distribution pair computed.
    pub csv: Vec<(String, String)>,
}

impl Report {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.document).expect("serializable report")
    }
}

pub fn num(r: &Rational) -> Value {
    json!({"exact": render_rational(r), "decimal": decimal(r, 12)})
}

fn rv_json(x: &RandomVariable<Rational>) -> Value {
    Value::Array(x.values().iter().map(|v| Value::String(render_rational(v))).collect())
}

fn verdict_json(v: &Verdict) -> Value {
    serde_json::to_value(v).expect("serializable verdict")
}

#[derive(Default)]
struct Outcome {
    verdict: Option<Verdict>,
    violation: Option<String>,
    values: Value,
    csv: Option<(String, String)>,
}

impl Outcome {
    fn values(values: Value) -> Self {
        Outcome {
            values,
            ..Default::default()
        }
    }

    fn verdict(verdict: Verdict, values: Value) -> Self {
        Outcome {
            verdict: Some(verdict),
            values,
            ..Default::default()
        }
    }

    /// A `Fails` here contradicts a proven relation.
    fn trapped(verdict: Verdict, values: Value, what: &str) -> Self {
        let violation = verdict.fails().then(|| what.to_string());
        Outcome {
            verdict: Some(verdict),
            violation,
            values,
            csv: None,
        }
    }
}

fn axiom_samples(s: &Scenario) -> (Vec<(RandomVariable<Rational>, RandomVariable<Rational>)>, Vec<Rational>) {
    let n = s.model.size();
    let mut vars: Vec<RandomVariable<Rational>> = s.variables.iter().map(|(_, x)| x.clone()).collect();
    vars.push(RandomVariable::constant(n, Rational::from_integer(1.into())));
    let mut pairs = Vec::new();
    for a in &vars {
        for b in &vars {
            pairs.push((a.clone(), b.clone()));
        }
    }
    let lambdas = [(0, 1), (1, 2), (1, 1), (2, 1), (3, 1)]
        .iter()
        .map(|&(a, b)| Rational::new(a.into(), b.into()))
        .collect();
    (pairs, lambdas)
}

fn run_check(s: &Scenario, check: &Check) -> Result<Outcome> {
    let model = &s.model;
    Ok(match check {
        Check::Expectation { variable } => {
            let x = s.variable(variable)?;
            let upper = model.upper_expectation(x)?;
            let lower = model.lower_expectation(x)?;
            let mut o = Outcome::values(json!({"upper": num(&upper), "lower": num(&lower)}));
            if lower > upper {
                o.violation = Some("lower expectation exceeds upper expectation".into());
            }
            o
        }
        Check::Capacity { event } => {
            let e = s.event(event)?;
            let upper = model.capacity(&e)?;
            let lower = model.lower_capacity(&e)?;
            Outcome::values(json!({"upper": num(&upper), "lower": num(&lower), "polar": model.is_polar(&e)?}))
        }
        Check::Axioms => {
            let (pairs, lambdas) = axiom_samples(s);
            let r = verify_axioms(model, &pairs, &lambdas)?;
            let values = json!({"pairs": pairs.len(), "events_checked": r.events_checked});
            Outcome::trapped(r.verdict, values, "sublinear expectation axioms")
        }
        Check::Seminorm { variable, p } => {
            let r = lp_seminorm(model, s.variable(variable)?, p)?;
            Outcome::values(json!({
                "p": render_rational(p),
                "pth_power": num(&r.pth_power),
                "value": if r.value_exact { Value::String(render_rational(&r.value)) } else { Value::Null },
                "decimal": r.decimal,
            }))
        }
        Check::LbMembership { variable, p } => {
            let r = lb_membership(model, s.variable(variable)?, p)?;
            let tails: Vec<Value> = r.tails.iter().map(num).collect();
            Outcome::verdict(r.verdict, json!({"tails": tails, "stabilization": r.stabilization}))
        }
        Check::DistributionPair { variable } => {
            let x = s.variable(variable)?;
            let pair = distribution_pair(model, x)?;
            let properties = pair_properties_check(model, x)?;
            let literal = lower_continuity_claim(model, x)?;
            let two_monotone = two_monotone_check(model, x)?;
            let atoms: Vec<Value> = capacity_atoms(model, x)?.iter().map(num).collect();
            let values = json!({
                "jumps": pair.jumps.iter().map(num).collect::<Vec<_>>(),
                "upper": pair.upper.iter().map(num).collect::<Vec<_>>(),
                "lower": pair.lower.iter().map(num).collect::<Vec<_>>(),
                "capacity_atoms": atoms,
                "two_monotone": verdict_json(&two_monotone),
                "lower_continuity_literal": verdict_json(&literal),
            });
            let mut o = Outcome::trapped(properties, values, "distribution pair properties");
            o.csv = Some((format!("{variable}.csv"), pair.to_csv()));
            o
        }
        Check::DistributionCapacity { variable, set } => {
            let a = RealSet::parse(set)?;
            let v = distribution_capacity(model, s.variable(variable)?, &a)?;
            Outcome::values(json!({"set": a.to_string(), "capacity": num(&v)}))
        }
        Check::Convergence {
            sequence,
            mode,
            p,
            r,
            epsilon_grid,
            n_max,
        } => {
            let params = mode_params(mode, p.as_ref(), r.as_ref(), epsilon_grid.as_ref(), *n_max)?;
            let v = check_convergence(model, s.sequence(sequence)?, &params)?;
            Outcome::verdict(v, json!({"mode": params.mode.to_string()}))
        }
        Check::Implications { sequence, r, p } => {
            let seq = s.sequence(sequence)?;
            let report = implication_audit(model, seq, r, p, &ModeParams::default())?;
            let verdicts: Vec<Value> = report
                .verdicts
                .iter()
                .map(|(m, v)| json!({"mode": m.to_string(), "verdict": verdict_json(v)}))
                .collect();
            let arrows: Vec<Value> = report
                .arrows
                .iter()
                .map(|a| json!({"from": a.from.to_string(), "to": a.to.to_string(), "consistent": a.consistent}))
                .collect();
            let qs = report.verdict(&Mode::QS).expect("audited");
            let cap = report.verdict(&Mode::Capacity).expect("audited");
            let agree = qs.holds() == cap.holds() && qs.fails() == cap.fails();
            let mut o = Outcome::values(json!({
                "verdicts": verdicts,
                "arrows": arrows,
                "qs_capacity_agree": agree,
            }));
            if let Some(a) = report.violations().first() {
                o.violation = Some(format!("arrow {} => {} violated", a.from, a.to));
            } else if !agree {
                o.violation = Some("q.s. and capacity verdicts disagree on a finite model".into());
            }
            o
        }
        Check::Subsequence { sequence, probes } => {
            let seq = s.sequence(sequence)?;
            let probes = if probes.is_empty() {
                SubsequenceProbe::defaults()
            } else {
                probes.iter().map(|p| parse_probe(p)).collect::<Result<_>>()?
            };
            let params = ModeParams::default();
            let capacity = check_convergence(model, seq, &params)?;
            let v = subsequence_principle(model, seq, &probes, &params)?;
            let mut o = Outcome::verdict(v.clone(), json!({"capacity": verdict_json(&capacity)}));
            if capacity.holds() != v.holds() {
                o.violation = Some("subsequence principle disagrees with capacity convergence".into());
            }
            o
        }
        Check::ContinuousMapping {
            sequence,
            map,
            coefficients,
        } => {
            let f = parse_map(map, coefficients)?;
            let r = continuous_mapping_check(model, s.sequence(sequence)?, &f, &ModeParams::default())?;
            let indices: Vec<Value> = r
                .indices
                .iter()
                .map(|(e, n)| json!({"epsilon": render_rational(e), "n": n.to_string()}))
                .collect();
            let values = json!({"map": f.to_string(), "lipschitz": render_rational(&r.lipschitz), "indices": indices});
            Outcome::trapped(r.verdict, values, "continuous mapping")
        }
        Check::Markov { variable, lambda, p } => {
            let r = markov_bound(model, s.variable(variable)?, lambda, p)?;
            let values = json!({"lhs": num(&r.lhs), "rhs": num(&r.rhs), "exact": r.exact});
            Outcome::trapped(r.verdict, values, "Markov inequality")
        }
        Check::BorelCantelli { prefix, cycle } => {
            let schedule = s.schedule(prefix, cycle)?;
            let v = borel_cantelli_check(model, &schedule)?;
            Outcome::trapped(v, json!({"limsup_atoms": schedule.limsup(model.size()).len()}), "Borel-Cantelli")
        }
        Check::Dct {
            sequence,
            dominator,
            epsilon,
        } => {
            let seq = s.sequence(sequence)?;
            let y = match dominator {
                Some(name) => s.variable(name)?.clone(),
                None => seq
                    .triangle_dominator()
                    .ok_or_else(|| Error::Precondition("sequence has no bounded dominator".into()))?,
            };
            let c = dct_certificate(model, seq, &y, epsilon, &ModeParams::default())?;
            let samples: Vec<Value> = c
                .samples
                .iter()
                .map(|x| {
                    json!({
                        "n": x.n.to_string(),
                        "truncation": num(&x.truncation),
                        "tail_n": num(&x.tail_n),
                        "tail_limit": num(&x.tail_limit),
                        "distance": num(&x.distance),
                        "rounding": x.err,
                        "certified": x.certified,
                    })
                })
                .collect();
            let values = json!({
                "epsilon": render_rational(&c.epsilon),
                "dominator": rv_json(&y),
                "c": render_rational(&c.c),
                "n": c.n.to_string(),
                "samples": samples,
                "analytic_tail": c.analytic_tail,
                "capacity_at_n": num(&c.capacity_at_n),
                "lb_stabilization": c.lb_check.stabilization,
            });
            Outcome::trapped(c.verdict, values, "dominated convergence certificate")
        }
        Check::Portmanteau { sequence } => {
            let r = portmanteau_audit(model, s.sequence(sequence)?)?;
            let claims: Vec<Value> = r.claims.iter().map(verdict_json).collect();
            let mut o = Outcome::verdict(
                r.claims[0].clone(),
                json!({"claims": claims, "consistent": r.consistent, "probes": r.probes_checked}),
            );
            if !r.consistent {
                o.violation = Some("portmanteau claims disagree".into());
            }
            o
        }
        Check::DfConvergence { sequence } => {
            let r = df_convergence_audit(model, s.sequence(sequence)?)?;
            let mut o = Outcome::verdict(
                r.verdict.clone(),
                json!({
                    "pointwise": verdict_json(&r.pointwise),
                    "unions": verdict_json(&r.unions),
                    "claim_one": verdict_json(&r.claim_one),
                    "atom_exclusions": r.atom_exclusions,
                    "consistent": r.consistent,
                }),
            );
            if !r.consistent {
                o.violation = Some("distribution-function criterion disagrees with claim (1)".into());
            }
            o
        }
        Check::ConstantLimit { sequence, constant } => {
            let r = constant_limit_check(model, s.sequence(sequence)?, constant, &ModeParams::default())?;
            let mut o = Outcome::verdict(
                r.verdict.clone(),
                json!({
                    "distribution": verdict_json(&r.distribution),
                    "chain": verdict_json(&r.chain),
                    "right_side_vanishes": verdict_json(&r.right_side_vanishes),
                    "capacity": verdict_json(&r.capacity),
                    "consistent": r.consistent,
                }),
            );
            if !r.consistent {
                o.violation = Some("constant-limit upgrade disagrees with capacity convergence".into());
            }
            o
        }
        Check::UniformIntegrability { sequence, variables } => {
            let list: Vec<RandomVariable<Rational>>;
            let family = match sequence {
                Some(name) => UiFamily::Sequence(s.sequence(name)?),
                None => {
                    list = variables.iter().map(|v| s.variable(v).cloned()).collect::<Result<_>>()?;
                    UiFamily::List(&list)
                }
            };
            let r = uniform_integrability(model, family)?;
            let modulus: Vec<Value> = r
                .modulus
                .iter()
                .map(|(c, m)| match m {
                    ModulusValue::Finite(v) => json!({"c": render_rational(c), "value": num(v)}),
                    ModulusValue::Unbounded => json!({"c": render_rational(c), "value": "unbounded"}),
                })
                .collect();
            Outcome::verdict(
                r.verdict,
                json!({"modulus": modulus, "cutoff": r.cutoff.as_ref().map(render_rational)}),
            )
        }
        Check::MonotoneConvergence { sequence } => {
            let seq = s.sequence(sequence)?;
            let limit = seq.require_target()?;
            let r = monotone_convergence_check(model, seq, &limit)?;
            let values = json!({
                "expectations": r.expectations.iter().map(num).collect::<Vec<_>>(),
                "limit_expectation": num(&r.limit_expectation),
                "residual_bound": r.residual_bound,
            });
            Outcome::trapped(r.verdict, values, "monotone convergence")
        }
    })
}

/// Audits a functional that adds a tenth of the sup norm to the upper
/// expectation; it breaks constant preservation, so the run must exit 2.
fn doctored_axioms(s: &Scenario) -> Result<Outcome> {
    let (pairs, lambdas) = axiom_samples(s);
    let tenth = Rational::new(1.into(), 10.into());
    let model = &s.model;
    let f = |x: &RandomVariable<Rational>| {
        model.upper_expectation(x).expect("same space") + x.max_abs() * tenth.clone()
    };
    let r = verify_functional(model.size(), &f, &pairs, &lambdas)?;
    Ok(Outcome::trapped(r.verdict, json!({"doctored": true}), "doctored functional axioms"))
}

/// The check families behind each CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Eval,
    Converge,
    Portmanteau,
    Dct,
}

impl Group {
    pub fn kinds(self) -> &'static [&'static str] {
        match self {
            Group::Eval => &[
                "expectation",
                "capacity",
                "axioms",
                "seminorm",
                "lb_membership",
                "distribution_pair",
                "distribution_capacity",
                "markov",
                "borel_cantelli",
                "uniform_integrability",
            ],
            Group::Converge => &[
                "convergence",
                "implications",
                "subsequence",
                "continuous_mapping",
                "monotone_convergence",
            ],
            Group::Portmanteau => &["portmanteau", "df_convergence", "constant_limit"],
            Group::Dct => &["dct"],
        }
    }

    /// Default checks when the scenario lists none of this group's kinds.
    fn defaults(self, s: &Scenario, epsilons: &[Rational]) -> Vec<Check> {
        let one = || Rational::from_integer(1.into());
        let seqs = s.sequences.iter().map(|(n, _)| n.clone());
        match self {
            Group::Eval => {
                let mut checks = vec![Check::Axioms];
                for (name, _) in &s.variables {
                    checks.push(Check::Expectation { variable: name.clone() });
                    checks.push(Check::DistributionPair { variable: name.clone() });
                }
                checks
            }
            Group::Converge => seqs
                .flat_map(|name| {
                    let mut checks: Vec<Check> = ["qs", "capacity", "lp", "distribution", "complete", "slr"]
                        .iter()
                        .map(|mode| Check::Convergence {
                            sequence: name.clone(),
                            mode: mode.to_string(),
                            p: None,
                            r: None,
                            epsilon_grid: None,
                            n_max: None,
                        })
                        .collect();
                    checks.push(Check::Implications {
                        sequence: name,
                        r: one(),
                        p: one(),
                    });
                    checks
                })
                .collect(),
            Group::Portmanteau => s
                .sequences
                .iter()
                .filter(|(_, seq)| seq.declared_limit().is_some())
                .flat_map(|(name, _)| {
                    [
                        Check::Portmanteau { sequence: name.clone() },
                        Check::DfConvergence { sequence: name.clone() },
                    ]
                })
                .collect(),
            Group::Dct => seqs
                .flat_map(|name| {
                    epsilons.iter().map(move |e| Check::Dct {
                        sequence: name.clone(),
                        dominator: None,
                        epsilon: e.clone(),
                    })
                })
                .collect(),
        }
    }
}

/// The scenario's checks of the given group, or the group's defaults when
/// there are none. `epsilons` overrides the tolerances of DCT checks.
pub fn select_checks(s: &Scenario, group: Group, epsilons: &[Rational]) -> Vec<Check> {
    let mut picked: Vec<Check> = s
        .checks
        .iter()
        .filter(|c| group.kinds().contains(&c.kind()))
        .cloned()
        .collect();
    if picked.is_empty() {
        let default_eps = [Rational::new(1.into(), 10.into()), Rational::new(1.into(), 1000.into())];
        let eps = if epsilons.is_empty() { &default_eps[..] } else { epsilons };
        return group.defaults(s, eps);
    }
    if !epsilons.is_empty() && group == Group::Dct {
        let mut seen = Vec::new();
        picked = picked
            .into_iter()
            .filter_map(|c| match c {
                Check::Dct { sequence, dominator, .. } if !seen.contains(&(sequence.clone(), dominator.clone())) => {
                    seen.push((sequence.clone(), dominator.clone()));
                    Some(epsilons.iter().map(move |e| Check::Dct {
                        sequence: sequence.clone(),
                        dominator: dominator.clone(),
                        epsilon: e.clone(),
                    }))
                }
                _ => None,
            })
            .flatten()
            .collect();
    }
    picked
}

pub fn run_report(scenario: &Scenario, opts: &RunOptions) -> Report {
    let mut entries = Vec::new();
    let mut csv = Vec::new();
    let mut violations = Vec::new();
    let mut errors = 0usize;
    let selected = scenario.checks.iter().enumerate().filter(|(_, c)| {
        opts.only
            .as_ref()
            .is_none_or(|kinds| kinds.iter().any(|k| k == c.kind()))
    });
    let mut runs: Vec<(String, Option<String>, Result<Outcome>)> = selected
        .map(|(i, c)| {
            (
                format!("{}#{i}", c.kind()),
                c.subject().map(str::to_string),
                run_check(scenario, c),
            )
        })
        .collect();
    if opts.inject_fault {
        runs.push(("axioms#doctored".into(), None, doctored_axioms(scenario)));
    }
    for (id, subject, result) in runs {
        let mut entry = json!({"check": id, "subject": subject});
        match result {
            Ok(o) => {
                entry["status"] = json!(if o.violation.is_some() { "violation" } else { "ok" });
                if let Some(v) = &o.verdict {
                    entry["verdict"] = verdict_json(v);
                }
                entry["values"] = o.values;
                if let Some(v) = o.violation {
                    entry["violation"] = json!(v);
                    violations.push(format!("{id}: {v}"));
                }
                if let Some(c) = o.csv {
                    csv.push(c);
                }
            }
            Err(e) => {
                errors += 1;
                entry["status"] = json!("error");
                entry["error"] = json!(e.to_string());
            }
        }
        entries.push(entry);
    }
    let exit_code = if !violations.is_empty() {
        EXIT_VIOLATION
    } else if errors > 0 {
        EXIT_INPUT
    } else {
        EXIT_OK
    };
    let document = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": opts.seed,
        "atoms": scenario.model.size(),
        "measures": scenario.model.measures().len(),
        "checks": entries,
        "violations": violations,
        "errors": errors,
        "exit_code": exit_code,
    });
    Report {
        document,
        exit_code,
        csv,
    }
}
