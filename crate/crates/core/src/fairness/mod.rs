//! AFS, core and PF factors of a distribution, and decomposability.

mod audit;
mod bounds;
mod decompose;
mod factor;

pub use audit::{audit, audit_any, chain_verdict, AnyAudit, AuditOptions, ChainVerdict, FairnessAudit};
pub use bounds::{afs_factor, brute_afs, core_exact, core_lower_single, deviation_ratio, pf_score};
pub use decompose::{decompose, DecomposeResult, SNAP_TOL};
pub use factor::{AfsResult, AfsWitness, CoreResult, CoreWitness, Factor, PfResult, VoterSet};
