//! Sequential payment rules.

mod engine;
mod willingness;

pub use engine::{decomposition_from_trace, run_sequential, GroupPayment, Round, RuleTrace};
pub use willingness::{
    willingness_additive_third, willingness_custom, willingness_map, willingness_mps,
    willingness_ues, PaymentWillingness,
};
