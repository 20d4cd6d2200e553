//! Finite credal models of sublinear expectation: capacities, `L^p`
//! seminorms, convergence modes and distribution-level limits.
//!
//! Everything is generic over a [`Scalar`]; [`Rational`] gives exact
//! verdicts and `f64` gives fast approximate ones.

pub mod axioms;
pub mod convergence;
pub mod distribution;
pub mod error;
pub mod generate;
pub mod model;
pub mod rate;
pub mod report;
pub mod scalar;
pub mod scenario;
pub mod sequence;
pub mod spaces;
pub mod verdict;

pub use convergence::{check_convergence, Mode, ModeParams};
pub use error::{Error, Result};
pub use model::{CredalModel, EventSet, Expectation, Measure, RandomVariable, SampleSpace};
pub use rate::RateSequence;
pub use report::{run_report, Report, RunOptions};
pub use scalar::{Rational, Scalar};
pub use scenario::{parse_scenario, Check, Scenario};
pub use sequence::SequenceSpec;
pub use verdict::{Verdict, Witness};

pub type ExactModel = CredalModel<Rational>;
pub type FloatModel = CredalModel<f64>;
pub type ExactVariable = RandomVariable<Rational>;
pub type FloatVariable = RandomVariable<f64>;
pub type ExactMeasure = Measure<Rational>;
pub type FloatMeasure = Measure<f64>;
pub type ExactSequence = SequenceSpec<Rational>;
pub type FloatSequence = SequenceSpec<f64>;
pub type ExactRealSet = distribution::RealSet<Rational>;
