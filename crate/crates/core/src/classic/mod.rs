//! CUT, FUT and the Nash product rule.

mod cut;
mod fut;
mod nash;

pub use cut::run_cut;
pub use fut::{run_fut, FutEvent};
pub use nash::{
    run_nash, verify_nash, NashOutcome, NashReport, NashSolverConfig, NashViolation,
    NashViolationKind,
};
