use num_traits::Zero;

use crate::model::{ApprovalProfile, Decomposition, ExactDistribution, Q};

/// Every voter splits their budget evenly over their approved candidates of
/// maximum approval score.
pub fn run_cut(profile: &ApprovalProfile) -> (ExactDistribution, Decomposition) {
    let scores: Vec<u64> = (0..profile.m()).map(|x| profile.approval_score(x)).collect();
    let parts = profile
        .groups()
        .iter()
        .map(|g| {
            let best = g.ballot.iter().map(|x| scores[x]).max().expect("nonempty ballot");
            let top: Vec<_> = g.ballot.iter().filter(|&x| scores[x] == best).collect();
            let each = Q::new(1.into(), (top.len() as i64).into());
            let mut shares = vec![Q::zero(); profile.m()];
            for x in top {
                shares[x] = each.clone();
            }
            ExactDistribution::new(shares).expect("uniform split has unit mass")
        })
        .collect();
    let dec = Decomposition::new(profile, parts).expect("parts lie on ballots");
    (dec.aggregate(profile), dec)
}
