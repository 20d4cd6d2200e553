//! Scenario documents: a model, named variables and sequences, and the
//! checks to run on them. Rationals are written as `"p/q"` strings.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::convergence::{ContinuousMap, EventSchedule, Mode, ModeParams, SubsequenceProbe};
use crate::distribution::RealSet;
use crate::error::{Error, Result};
use crate::model::{CredalModel, EventSet, Measure, RandomVariable, SampleSpace};
use crate::rate::{RateSequence, FAMILIES};
use crate::scalar::{parse_rational, render_rational, Rational};
use crate::sequence::SequenceSpec;

/// Serde adapters writing rationals as exact strings.
mod exact {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&render_rational(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(r: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(r.iter().map(render_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod opt_vec {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Vec<Rational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match r {
                Some(v) => s.collect_seq(v.iter().map(render_rational)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Rational>>, D::Error> {
            Option::<Vec<String>>::deserialize(d)?
                .map(|v| {
                    v.iter()
                        .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                        .collect()
                })
                .transpose()
        }
    }
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

/// A requested audit. Names refer to the scenario's variables and sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    Expectation {
        variable: String,
    },
    /// Upper and lower capacity of an event given by atom labels.
    Capacity {
        event: Vec<String>,
    },
    /// Axioms on every pair of scenario variables.
    Axioms,
    Seminorm {
        variable: String,
        #[serde(with = "exact", default = "one")]
        p: Rational,
    },
    LbMembership {
        variable: String,
        #[serde(with = "exact", default = "one")]
        p: Rational,
    },
    DistributionPair {
        variable: String,
    },
    DistributionCapacity {
        variable: String,
        set: String,
    },
    Convergence {
        sequence: String,
        /// One of `qs`, `capacity`, `lp`, `distribution`, `complete`, `slr`.
        mode: String,
        #[serde(with = "exact::opt", default, skip_serializing_if = "Option::is_none")]
        p: Option<Rational>,
        #[serde(with = "exact::opt", default, skip_serializing_if = "Option::is_none")]
        r: Option<Rational>,
        #[serde(with = "exact::opt_vec", default, skip_serializing_if = "Option::is_none")]
        epsilon_grid: Option<Vec<Rational>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_max: Option<u64>,
    },
    Implications {
        sequence: String,
        #[serde(with = "exact", default = "one")]
        r: Rational,
        #[serde(with = "exact", default = "one")]
        p: Rational,
    },
    Subsequence {
        sequence: String,
        /// `identity`, `evens`, `odds`, `squares` or `affine A B`.
        #[serde(default)]
        probes: Vec<String>,
    },
    ContinuousMapping {
        sequence: String,
        /// `identity`, `square`, `abs`, `affine` or `polynomial`.
        map: String,
        #[serde(with = "exact::vec", default)]
        coefficients: Vec<Rational>,
    },
    Markov {
        variable: String,
        #[serde(with = "exact")]
        lambda: Rational,
        #[serde(with = "exact", default = "one")]
        p: Rational,
    },
    BorelCantelli {
        #[serde(default)]
        prefix: Vec<Vec<String>>,
        cycle: Vec<Vec<String>>,
    },
    Dct {
        sequence: String,
        /// Variable name; the triangle dominator when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dominator: Option<String>,
        #[serde(with = "exact")]
        epsilon: Rational,
    },
    Portmanteau {
        sequence: String,
    },
    DfConvergence {
        sequence: String,
    },
    ConstantLimit {
        sequence: String,
        #[serde(with = "exact")]
        constant: Rational,
    },
    UniformIntegrability {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sequence: Option<String>,
        #[serde(default)]
        variables: Vec<String>,
    },
    MonotoneConvergence {
        sequence: String,
    },
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::Expectation { .. } => "expectation",
            Check::Capacity { .. } => "capacity",
            Check::Axioms => "axioms",
            Check::Seminorm { .. } => "seminorm",
            Check::LbMembership { .. } => "lb_membership",
            Check::DistributionPair { .. } => "distribution_pair",
            Check::DistributionCapacity { .. } => "distribution_capacity",
            Check::Convergence { .. } => "convergence",
            Check::Implications { .. } => "implications",
            Check::Subsequence { .. } => "subsequence",
            Check::ContinuousMapping { .. } => "continuous_mapping",
            Check::Markov { .. } => "markov",
            Check::BorelCantelli { .. } => "borel_cantelli",
            Check::Dct { .. } => "dct",
            Check::Portmanteau { .. } => "portmanteau",
            Check::DfConvergence { .. } => "df_convergence",
            Check::ConstantLimit { .. } => "constant_limit",
            Check::UniformIntegrability { .. } => "uniform_integrability",
            Check::MonotoneConvergence { .. } => "monotone_convergence",
        }
    }

    /// The variable or sequence the check is about, if any.
    pub fn subject(&self) -> Option<&str> {
        match self {
            Check::Expectation { variable }
            | Check::Seminorm { variable, .. }
            | Check::LbMembership { variable, .. }
            | Check::DistributionPair { variable }
            | Check::DistributionCapacity { variable, .. }
            | Check::Markov { variable, .. } => Some(variable),
            Check::Convergence { sequence, .. }
            | Check::Implications { sequence, .. }
            | Check::Subsequence { sequence, .. }
            | Check::ContinuousMapping { sequence, .. }
            | Check::Dct { sequence, .. }
            | Check::Portmanteau { sequence }
            | Check::DfConvergence { sequence }
            | Check::ConstantLimit { sequence, .. }
            | Check::MonotoneConvergence { sequence } => Some(sequence),
            Check::UniformIntegrability { sequence, .. } => sequence.as_deref(),
            Check::Capacity { .. } | Check::Axioms | Check::BorelCantelli { .. } => None,
        }
    }
}

pub fn parse_mode(name: &str, p: Option<&Rational>, r: Option<&Rational>) -> Result<Mode> {
    let mode = match name {
        "qs" => Mode::QS,
        "capacity" => Mode::Capacity,
        "lp" => Mode::Lp(p.cloned().unwrap_or_else(one)),
        "distribution" => Mode::Distribution,
        "complete" => Mode::Complete,
        "slr" => Mode::SLr(r.cloned().unwrap_or_else(one)),
        other => {
            return Err(Error::Parse(format!(
                "unknown mode {other:?}; expected qs, capacity, lp, distribution, complete or slr"
            )))
        }
    };
    mode.validate()?;
    Ok(mode)
}

pub fn mode_params(
    mode: &str,
    p: Option<&Rational>,
    r: Option<&Rational>,
    grid: Option<&Vec<Rational>>,
    n_max: Option<u64>,
) -> Result<ModeParams> {
    let mut params = ModeParams::new(parse_mode(mode, p, r)?);
    if let Some(g) = grid {
        params.epsilon_grid = g.clone();
    }
    if let Some(n) = n_max {
        params.n_max = n;
    }
    params.validate()?;
    Ok(params)
}

pub fn parse_probe(text: &str) -> Result<SubsequenceProbe> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let bad = || Error::Parse(format!("unknown subsequence probe {text:?}"));
    Ok(match words.as_slice() {
        ["identity"] => SubsequenceProbe::Identity,
        ["evens"] => SubsequenceProbe::Evens,
        ["odds"] => SubsequenceProbe::Odds,
        ["squares"] => SubsequenceProbe::Squares,
        ["affine", a, b] => {
            let a: u64 = a.parse().map_err(|_| bad())?;
            let b: u64 = b.parse().map_err(|_| bad())?;
            if a == 0 {
                return Err(bad());
            }
            SubsequenceProbe::Affine { a, b }
        }
        _ => return Err(bad()),
    })
}

pub fn parse_map(name: &str, coefficients: &[Rational]) -> Result<ContinuousMap> {
    let arity = |n: usize| {
        if coefficients.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "map {name:?} takes {n} coefficients, found {}",
                coefficients.len()
            )))
        }
    };
    Ok(match name {
        "identity" => {
            arity(0)?;
            ContinuousMap::Identity
        }
        "square" => {
            arity(0)?;
            ContinuousMap::Square
        }
        "abs" => {
            arity(0)?;
            ContinuousMap::Abs
        }
        "affine" => {
            arity(2)?;
            ContinuousMap::Affine {
                a: coefficients[0].clone(),
                b: coefficients[1].clone(),
            }
        }
        "polynomial" => ContinuousMap::Polynomial(coefficients.to_vec()),
        other => {
            return Err(Error::Parse(format!(
                "unknown map {other:?}; expected identity, square, abs, affine or polynomial"
            )))
        }
    })
}

pub fn parse_rate(v: &Value) -> Result<RateSequence> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("rate must be an object, found {v}")))?;
    let family = obj
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("rate needs a \"family\" string".into()))?;
    let param = |key: &str| -> Result<Rational> {
        let text = obj
            .get(key)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse(format!("rate family {family:?} needs a {key:?} string")))?;
        parse_rational(text)
    };
    let expect_keys = |keys: &[&str]| -> Result<()> {
        match obj.keys().find(|k| *k != "family" && !keys.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!("unexpected key {k:?} in {family:?} rate"))),
            None => Ok(()),
        }
    };
    match family {
        "power" => {
            expect_keys(&["p"])?;
            RateSequence::power(param("p")?)
        }
        "geometric" => {
            expect_keys(&["r"])?;
            RateSequence::geometric(param("r")?)
        }
        "logpow" => {
            expect_keys(&["q"])?;
            RateSequence::logpow(param("q")?)
        }
        "constant" => {
            expect_keys(&["c"])?;
            Ok(RateSequence::constant(param("c")?))
        }
        "growth" => {
            expect_keys(&["p"])?;
            RateSequence::growth(param("p")?)
        }
        "alternating" => {
            expect_keys(&["base"])?;
            let base = obj
                .get("base")
                .ok_or_else(|| Error::Parse("alternating rate needs a \"base\"".into()))?;
            RateSequence::alternating(parse_rate(base)?)
        }
        other => Err(Error::UnknownFamily {
            found: other.to_string(),
            supported: FAMILIES.join(", "),
        }),
    }
}

pub fn rate_to_json(rate: &RateSequence) -> Value {
    let s = render_rational;
    match rate {
        RateSequence::Power { p } => json!({"family": "power", "p": s(p)}),
        RateSequence::Geometric { r } => json!({"family": "geometric", "r": s(r)}),
        RateSequence::LogPow { q } => json!({"family": "logpow", "q": s(q)}),
        RateSequence::Constant { c } => json!({"family": "constant", "c": s(c)}),
        RateSequence::Growth { p } => json!({"family": "growth", "p": s(p)}),
        RateSequence::Alternating { base } => {
            json!({"family": "alternating", "base": rate_to_json(base)})
        }
    }
}

/// Literal values or the name of a declared variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Values {
    Literal(Vec<String>),
    Name(String),
}

impl Values {
    fn literal(x: &RandomVariable<Rational>) -> Self {
        Values::Literal(x.values().iter().map(render_rational).collect())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    name: String,
    weights: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    values: Values,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    rate: Value,
    direction: Values,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<Values>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    terms: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    prefix: Vec<Values>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    limit: Option<Values>,
    /// Values `X_1, X_2, ...` of a sequence known only through a table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<Values>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    space: Vec<String>,
    measures: Vec<MeasureDoc>,
    #[serde(default)]
    variables: Vec<VariableDoc>,
    #[serde(default)]
    sequences: Vec<SequenceDoc>,
    #[serde(default)]
    checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: CredalModel<Rational>,
    pub measure_names: Vec<String>,
    pub variables: Vec<(String, RandomVariable<Rational>)>,
    pub sequences: Vec<(String, SequenceSpec<Rational>)>,
    pub checks: Vec<Check>,
}

impl Scenario {
    pub fn variable(&self, name: &str) -> Result<&RandomVariable<Rational>> {
        self.variables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, x)| x)
            .ok_or_else(|| Error::DanglingName(name.to_string()))
    }

    pub fn sequence(&self, name: &str) -> Result<&SequenceSpec<Rational>> {
        self.sequences
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, x)| x)
            .ok_or_else(|| Error::DanglingName(name.to_string()))
    }

    pub fn event(&self, labels: &[String]) -> Result<EventSet> {
        let space = self.model.space();
        let atoms = labels
            .iter()
            .map(|l| space.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        EventSet::new(space.len(), atoms)
    }

    pub fn schedule(&self, prefix: &[Vec<String>], cycle: &[Vec<String>]) -> Result<EventSchedule> {
        if cycle.is_empty() {
            return Err(Error::Parse("borel_cantelli needs a nonempty cycle".into()));
        }
        Ok(EventSchedule {
            prefix: prefix.iter().map(|e| self.event(e)).collect::<Result<_>>()?,
            cycle: cycle.iter().map(|e| self.event(e)).collect::<Result<_>>()?,
        })
    }

    /// Resolves every name and parses every embedded parameter of `check`.
    pub fn validate_check(&self, check: &Check) -> Result<()> {
        match check {
            Check::Expectation { variable } | Check::DistributionPair { variable } => {
                self.variable(variable)?;
            }
            Check::Seminorm { variable, p } | Check::LbMembership { variable, p } => {
                self.variable(variable)?;
                if *p < one() {
                    return Err(Error::InvalidParameter(format!(
                        "p must be at least 1, got {}",
                        render_rational(p)
                    )));
                }
            }
            Check::Markov { variable, lambda, p } => {
                self.variable(variable)?;
                if *lambda <= Rational::from_integer(0.into()) || *p < one() {
                    return Err(Error::InvalidParameter(
                        "markov needs lambda > 0 and p >= 1".into(),
                    ));
                }
            }
            Check::DistributionCapacity { variable, set } => {
                self.variable(variable)?;
                RealSet::<Rational>::parse(set)?;
            }
            Check::Capacity { event } => {
                self.event(event)?;
            }
            Check::Axioms => {}
            Check::Convergence {
                sequence,
                mode,
                p,
                r,
                epsilon_grid,
                n_max,
            } => {
                self.sequence(sequence)?;
                mode_params(mode, p.as_ref(), r.as_ref(), epsilon_grid.as_ref(), *n_max)?;
            }
            Check::Implications { sequence, r, p } => {
                self.sequence(sequence)?;
                Mode::SLr(r.clone()).validate()?;
                Mode::Lp(p.clone()).validate()?;
            }
            Check::Subsequence { sequence, probes } => {
                self.sequence(sequence)?;
                for p in probes {
                    parse_probe(p)?;
                }
            }
            Check::ContinuousMapping {
                sequence,
                map,
                coefficients,
            } => {
                self.sequence(sequence)?;
                parse_map(map, coefficients)?;
            }
            Check::BorelCantelli { prefix, cycle } => {
                self.schedule(prefix, cycle)?;
            }
            Check::Dct {
                sequence,
                dominator,
                epsilon,
            } => {
                self.sequence(sequence)?;
                if let Some(d) = dominator {
                    self.variable(d)?;
                }
                if *epsilon <= Rational::from_integer(0.into()) {
                    return Err(Error::InvalidParameter("epsilon must be positive".into()));
                }
            }
            Check::Portmanteau { sequence }
            | Check::DfConvergence { sequence }
            | Check::ConstantLimit { sequence, .. }
            | Check::MonotoneConvergence { sequence } => {
                self.sequence(sequence)?;
            }
            Check::UniformIntegrability { sequence, variables } => {
                if let Some(s) = sequence {
                    self.sequence(s)?;
                }
                for v in variables {
                    self.variable(v)?;
                }
                if sequence.is_some() == !variables.is_empty() {
                    return Err(Error::Parse(
                        "uniform_integrability needs either a sequence or a list of variables".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let space = self.model.space().labels().to_vec();
        let measures: Vec<MeasureDoc> = self
            .model
            .measures()
            .iter()
            .zip(&self.measure_names)
            .map(|(m, name)| MeasureDoc {
                name: name.clone(),
                weights: m.weights().iter().map(render_rational).collect(),
            })
            .collect();
        let variables = self
            .variables
            .iter()
            .map(|(name, x)| VariableDoc {
                name: name.clone(),
                values: Values::literal(x),
            })
            .collect();
        let sequences = self
            .sequences
            .iter()
            .map(|(name, s)| sequence_doc(name, s))
            .collect();
        let doc = Document {
            space,
            measures,
            variables,
            sequences,
            checks: self.checks.clone(),
        };
        serde_json::to_value(doc).expect("serializable document")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable document")
    }
}

fn sequence_doc(name: &str, s: &SequenceSpec<Rational>) -> SequenceDoc {
    let limit = s.declared_limit().map(Values::literal);
    if s.is_tabulated_only() {
        return SequenceDoc {
            name: name.to_string(),
            base: None,
            terms: Vec::new(),
            prefix: Vec::new(),
            limit,
            table: Some(s.prefix().iter().map(Values::literal).collect()),
        };
    }
    SequenceDoc {
        name: name.to_string(),
        base: Some(Values::literal(s.base())),
        terms: s
            .terms()
            .iter()
            .map(|t| TermDoc {
                rate: rate_to_json(&t.rate),
                direction: Values::literal(&t.direction),
            })
            .collect(),
        prefix: s.prefix().iter().map(Values::literal).collect(),
        limit,
        table: None,
    }
}

struct Resolver<'a> {
    size: usize,
    variables: &'a [(String, RandomVariable<Rational>)],
}

impl Resolver<'_> {
    fn resolve(&self, v: &Values) -> Result<RandomVariable<Rational>> {
        match v {
            Values::Name(n) => self
                .variables
                .iter()
                .find(|(name, _)| name == n)
                .map(|(_, x)| x.clone())
                .ok_or_else(|| Error::DanglingName(n.clone())),
            Values::Literal(items) => {
                if items.len() != self.size {
                    return Err(Error::DimensionMismatch {
                        expected: self.size,
                        found: items.len(),
                    });
                }
                Ok(RandomVariable::new(
                    items.iter().map(|t| parse_rational(t)).collect::<Result<_>>()?,
                ))
            }
        }
    }
}

fn unique<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::DuplicateName(n.to_string()));
        }
    }
    Ok(())
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    from_document(doc)
}

pub fn scenario_from_json(value: Value) -> Result<Scenario> {
    let doc: Document = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    from_document(doc)
}

fn from_document(doc: Document) -> Result<Scenario> {
    let space = SampleSpace::new(doc.space)?;
    let size = space.len();
    unique(doc.measures.iter().map(|m| m.name.as_str()))?;
    let mut measures = Vec::with_capacity(doc.measures.len());
    for m in &doc.measures {
        if m.weights.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: m.weights.len(),
            });
        }
        let w = m
            .weights
            .iter()
            .map(|t| parse_rational(t))
            .collect::<Result<Vec<_>>>()?;
        measures.push(Measure::named(&m.name, w)?);
    }
    let model = CredalModel::new(space, measures)?;
    unique(
        doc.variables
            .iter()
            .map(|v| v.name.as_str())
            .chain(doc.sequences.iter().map(|s| s.name.as_str())),
    )?;
    let mut variables: Vec<(String, RandomVariable<Rational>)> = Vec::new();
    for v in &doc.variables {
        let x = Resolver {
            size,
            variables: &variables,
        }
        .resolve(&v.values)?;
        variables.push((v.name.clone(), x));
    }
    let resolver = Resolver {
        size,
        variables: &variables,
    };
    let mut sequences = Vec::new();
    for s in &doc.sequences {
        sequences.push((s.name.clone(), build_sequence(&resolver, s)?));
    }
    let scenario = Scenario {
        model,
        measure_names: doc.measures.iter().map(|m| m.name.clone()).collect(),
        variables,
        sequences,
        checks: doc.checks,
    };
    for c in &scenario.checks {
        scenario.validate_check(c)?;
    }
    Ok(scenario)
}

fn build_sequence(r: &Resolver<'_>, s: &SequenceDoc) -> Result<SequenceSpec<Rational>> {
    let mut seq = match &s.table {
        Some(table) => {
            if s.base.is_some() || !s.terms.is_empty() || !s.prefix.is_empty() {
                return Err(Error::Parse(format!(
                    "sequence {:?}: a table excludes base, terms and prefix",
                    s.name
                )));
            }
            let values = table.iter().map(|v| r.resolve(v)).collect::<Result<Vec<_>>>()?;
            SequenceSpec::tabulated(values)?
        }
        None => {
            let base = s
                .base
                .as_ref()
                .ok_or_else(|| Error::Parse(format!("sequence {:?} needs a base or a table", s.name)))?;
            let mut seq = SequenceSpec::new(r.resolve(base)?);
            for t in &s.terms {
                seq = seq.with_term(parse_rate(&t.rate)?, r.resolve(&t.direction)?)?;
            }
            let prefix = s.prefix.iter().map(|v| r.resolve(v)).collect::<Result<Vec<_>>>()?;
            seq.with_prefix(prefix)?
        }
    };
    if let Some(l) = &s.limit {
        seq = seq.with_limit(r.resolve(l)?)?;
    }
    Ok(seq)
}

/// Minimal scenario skeleton, handy in docs and tests.
pub fn example_document() -> Value {
    let mut m = Map::new();
    m.insert("space".into(), json!(["a", "b", "c"]));
    m.insert(
        "measures".into(),
        json!([
            {"name": "P1", "weights": ["1/2", "1/2", "0"]},
            {"name": "P2", "weights": ["0", "1/2", "1/2"]}
        ]),
    );
    m.insert(
        "variables".into(),
        json!([
            {"name": "X", "values": ["1", "2", "4"]},
            {"name": "D", "values": ["1", "-2", "3"]}
        ]),
    );
    m.insert(
        "sequences".into(),
        json!([{
            "name": "S",
            "base": "X",
            "terms": [{"rate": {"family": "power", "p": "2"}, "direction": "D"}],
            "limit": "X"
        }]),
    );
    m.insert(
        "checks".into(),
        json!([
            {"kind": "expectation", "variable": "X"},
            {"kind": "distribution_pair", "variable": "X"},
            {"kind": "implications", "sequence": "S", "r": "1", "p": "1"},
            {"kind": "portmanteau", "sequence": "S"},
            {"kind": "dct", "sequence": "S", "epsilon": "1/10"}
        ]),
    );
    Value::Object(m)
}
