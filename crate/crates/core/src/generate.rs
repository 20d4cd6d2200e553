//! Seeded random scenarios for fuzzing.

use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convergence::{check_convergence, Mode, ModeParams};
use crate::error::{Error, Result};
use crate::model::{CredalModel, Measure, RandomVariable, SampleSpace};
use crate::rate::RateSequence;
use crate::scalar::{int, ratio, Rational};
use crate::scenario::{Check, Scenario};
use crate::sequence::SequenceSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSize {
    pub max_atoms: usize,
    pub max_measures: usize,
    pub max_terms: usize,
}

impl Default for GenSize {
    fn default() -> Self {
        GenSize {
            max_atoms: 8,
            max_measures: 6,
            max_terms: 3,
        }
    }
}

fn small_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let d = *[1i64, 1, 1, 2, 3, 4].choose(rng).expect("nonempty");
    ratio(rng.gen_range(-bound * d..=bound * d), d)
}

fn random_rv(rng: &mut ChaCha8Rng, size: usize, bound: i64) -> RandomVariable<Rational> {
    RandomVariable::new((0..size).map(|_| small_rational(rng, bound)).collect())
}

/// Decaying rates are drawn more often than the non-convergent ones.
pub fn random_rate(rng: &mut ChaCha8Rng) -> RateSequence {
    let base = |rng: &mut ChaCha8Rng| -> RateSequence {
        match rng.gen_range(0..8) {
            0..=2 => {
                let p = [ratio(1, 2), int(1), ratio(3, 2), int(2), int(3)];
                RateSequence::power(p.choose(rng).expect("nonempty").clone()).expect("valid")
            }
            3 | 4 => {
                let r = [ratio(1, 2), ratio(1, 3), ratio(2, 3), ratio(3, 4)];
                RateSequence::geometric(r.choose(rng).expect("nonempty").clone()).expect("valid")
            }
            5 => RateSequence::logpow(int(rng.gen_range(1..=3))).expect("valid"),
            6 => {
                let c = [int(-1), ratio(1, 2), int(1), int(2)];
                RateSequence::constant(c.choose(rng).expect("nonempty").clone())
            }
            _ => {
                let p = [ratio(1, 2), int(1), int(2)];
                RateSequence::growth(p.choose(rng).expect("nonempty").clone()).expect("valid")
            }
        }
    };
    if rng.gen_ratio(1, 5) {
        loop {
            let b = base(rng);
            if !matches!(b, RateSequence::Growth { .. }) {
                return RateSequence::alternating(b).expect("valid");
            }
        }
    }
    base(rng)
}

/// Random credal model; with probability 1/4 some atoms are polar.
pub fn random_model(rng: &mut ChaCha8Rng, size: GenSize) -> Result<(CredalModel<Rational>, Vec<String>)> {
    let n = rng.gen_range(1..=size.max_atoms);
    let polar: Vec<bool> = if n >= 2 && rng.gen_ratio(1, 4) {
        let k = rng.gen_range(1..n);
        let mut flags = vec![true; k];
        flags.extend(vec![false; n - k]);
        flags.shuffle(rng);
        flags
    } else {
        vec![false; n]
    };
    let m = rng.gen_range(1..=size.max_measures);
    let mut measures = Vec::with_capacity(m);
    let mut names = Vec::with_capacity(m);
    for j in 0..m {
        let raw: Vec<i64> = loop {
            let w: Vec<i64> = polar
                .iter()
                .map(|&p| if p { 0 } else { rng.gen_range(0..=6) })
                .collect();
            if w.iter().any(|&x| x > 0) {
                break w;
            }
        };
        let total: i64 = raw.iter().sum();
        let name = format!("P{}", j + 1);
        measures.push(Measure::named(&name, raw.iter().map(|&w| ratio(w, total)).collect())?);
        names.push(name);
    }
    let space = SampleSpace::anonymous(n)?;
    Ok((CredalModel::new(space, measures)?, names))
}

pub fn generate_random_scenario(seed: u64, size: GenSize) -> Result<Scenario> {
    if size.max_atoms == 0 || size.max_measures == 0 || size.max_terms == 0 {
        return Err(Error::InvalidParameter("generator bounds must be positive".into()));
    }
    if size.max_atoms > 8 || size.max_measures > 6 || size.max_terms > 3 {
        return Err(Error::InvalidParameter(
            "generator bounds are at most 8 atoms, 6 measures and 3 terms".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (model, measure_names) = random_model(&mut rng, size)?;
    let n = model.size();

    let constant_limit = rng.gen_ratio(1, 4);
    let x = if constant_limit {
        RandomVariable::constant(n, small_rational(&mut rng, 3))
    } else {
        random_rv(&mut rng, n, 4)
    };
    let mut variables = vec![("X".to_string(), x.clone())];
    let mut seq = SequenceSpec::new(x.clone());
    for k in 0..rng.gen_range(0..=size.max_terms) {
        let d = random_rv(&mut rng, n, 3);
        seq = seq.with_term(random_rate(&mut rng), d.clone())?;
        variables.push((format!("D{}", k + 1), d));
    }
    if rng.gen_ratio(1, 3) {
        let len = rng.gen_range(1..=2);
        seq = seq.with_prefix((0..len).map(|_| random_rv(&mut rng, n, 5)).collect())?;
    }
    let mut limit = seq.limit_rv().candidate;
    if rng.gen_ratio(1, 8) {
        let w = rng.gen_range(0..n);
        let bumped = limit.get(w).clone() + Rational::one();
        let mut values = limit.into_values();
        values[w] = bumped;
        limit = RandomVariable::new(values);
    }
    seq = seq.with_limit(limit.clone())?;
    let dominator = seq.triangle_dominator();
    if let Some(y) = &dominator {
        variables.push(("Y".to_string(), y.clone()));
    }

    let r = int(rng.gen_range(1..=2));
    let p = int(rng.gen_range(1..=2));
    let lambda = ratio(rng.gen_range(1..=12), rng.gen_range(1..=4));
    let mut checks = vec![
        Check::Axioms,
        Check::Expectation {
            variable: "X".into(),
        },
        Check::DistributionPair {
            variable: "X".into(),
        },
        Check::Markov {
            variable: "X".into(),
            lambda,
            p: int(rng.gen_range(1..=3)),
        },
        Check::Implications {
            sequence: "S".into(),
            r,
            p,
        },
        Check::Subsequence {
            sequence: "S".into(),
            probes: Vec::new(),
        },
        Check::Portmanteau {
            sequence: "S".into(),
        },
        Check::DfConvergence {
            sequence: "S".into(),
        },
    ];
    if limit.is_constant() {
        checks.push(Check::ConstantLimit {
            sequence: "S".into(),
            constant: limit.get(0).clone(),
        });
    }
    let capacity = check_convergence(&model, &seq, &ModeParams::new(Mode::Capacity))?;
    if capacity.holds() {
        checks.push(Check::ContinuousMapping {
            sequence: "S".into(),
            map: "square".into(),
            coefficients: Vec::new(),
        });
        if dominator.is_some() {
            for eps in [ratio(1, 10), ratio(1, 1000)] {
                checks.push(Check::Dct {
                    sequence: "S".into(),
                    dominator: Some("Y".into()),
                    epsilon: eps,
                });
            }
        }
    }
    let polar: Vec<String> = model
        .polar_atoms()
        .iter()
        .map(|w| model.space().labels()[w].clone())
        .collect();
    checks.push(Check::BorelCantelli {
        prefix: vec![model.space().labels().to_vec()],
        cycle: vec![polar],
    });
    Ok(Scenario {
        model,
        measure_names,
        variables,
        sequences: vec![("S".to_string(), seq)],
        checks,
    })
}
