//! Axiom checkers and seeded fuzzing.

mod checks;
mod claims;
mod fuzz;
mod generate;
mod verdict;

pub use checks::{
    check, check_afs_bound, check_core_bound, check_monotonicity_step, check_rpc_pair, check_spc_pair,
    check_unanimity, check_wpc_pair, Axiom, CheckOptions,
};
pub use claims::{builtin_claims, ClaimsTable};
pub use fuzz::{fuzz, fuzz_outcomes, trial_input, FuzzConfig, FuzzFailure, FuzzReport, TrialOutcome};
pub use generate::{
    candidate_names, random_pair, random_profile, random_step, random_unanimous, GeneratorConfig,
};
pub use verdict::{AxiomVerdict, CheckInput, Status, Witness};
