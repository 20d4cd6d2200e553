//! Distribution capacities, distribution-function pairs and convergence in
//! distribution.

pub mod capacity;
pub mod function;
pub mod portmanteau;
pub mod realset;

pub use capacity::*;
pub use function::{Knot, PiecewiseFn};
pub use portmanteau::{
    constant_limit_check, df_convergence_audit, distribution_claim, portmanteau_audit,
    ConstantLimitReport, DfReport, LimitLaw, PortmanteauReport, Probe, Triple,
};
pub use realset::{Interval, RealSet};
