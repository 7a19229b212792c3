//! Brute-force references: a small exact LP and exhaustive subset searches.

mod enumerate;
mod lp;

pub use enumerate::{
    enumerate_afs, enumerate_core, enumerate_core_voters, Deviations, AFS_LIMIT, CORE_LIMIT,
};
pub use lp::{lp_maximin, MaximinLp, MaximinSolution};
