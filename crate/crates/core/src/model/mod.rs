//! Candidates, approval profiles, distributions and their encodings.

mod decomposition;
mod distribution;
mod format;
mod profile;
mod scalar;

pub use decomposition::Decomposition;
pub use distribution::{
    ranking_prefix_equal, Distribution, DistributionRanking, ExactDistribution,
    FloatDistribution, FLOAT_SUM_TOL,
};
pub use format::{
    parse_distribution, parse_profile, parse_profile_json, parse_profile_text, profile_to_json,
    render_profile_text, AnyDistribution,
};
pub use profile::{ApprovalBallot, ApprovalProfile, Candidate, CandidateId, Group};
pub use scalar::{
    is_nonnegative, parse_q, q, render_f64, render_q, snap_to_q, sum, Scalar, DEFAULT_TOL, Q,
};
