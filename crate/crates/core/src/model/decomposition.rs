use num_traits::Zero;

use super::distribution::ExactDistribution;
use super::profile::ApprovalProfile;
use super::scalar::{Scalar, Q};
use crate::error::{Error, Result};

/// Individual distributions `p^i`, one per voter group.
///
/// Voters sharing a ballot can always be given the same individual
/// distribution (average theirs), so one entry per group is enough.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    parts: Vec<ExactDistribution>,
}

impl Decomposition {
    pub fn new(profile: &ApprovalProfile, parts: Vec<ExactDistribution>) -> Result<Self> {
        if parts.len() != profile.groups().len() {
            return Err(Error::model(format!(
                "decomposition has {} parts for {} voter groups",
                parts.len(),
                profile.groups().len()
            )));
        }
        for (gi, (part, g)) in parts.iter().zip(profile.groups()).enumerate() {
            if part.m() != profile.m() {
                return Err(Error::model("decomposition part over the wrong candidates"));
            }
            if let Some(x) = (0..part.m()).find(|&x| !part.share(x).is_zero() && !g.ballot.contains(x)) {
                return Err(Error::model(format!(
                    "group {gi} pays candidate {} outside its ballot",
                    profile.name(x)
                )));
            }
        }
        Ok(Decomposition { parts })
    }

    pub fn parts(&self) -> &[ExactDistribution] {
        &self.parts
    }

    pub fn group(&self, group: usize) -> &ExactDistribution {
        &self.parts[group]
    }

    /// `p^i` for voter id `voter`.
    pub fn voter(&self, profile: &ApprovalProfile, voter: u64) -> Option<&ExactDistribution> {
        let mut start = 0;
        for (gi, g) in profile.groups().iter().enumerate() {
            if voter < start + g.count {
                return self.parts.get(gi);
            }
            start += g.count;
        }
        None
    }

    /// `(1/n) Σ_i p^i`.
    pub fn aggregate(&self, profile: &ApprovalProfile) -> ExactDistribution {
        let n = Q::from_integer(profile.n().into());
        let mut shares = vec![Q::zero(); profile.m()];
        for (part, g) in self.parts.iter().zip(profile.groups()) {
            let w = Q::from_integer(g.count.into()) / &n;
            for (x, s) in part.shares().iter().enumerate() {
                if !s.is_zero() {
                    shares[x] += &w * s;
                }
            }
        }
        ExactDistribution::new(shares).expect("aggregate of unit parts has unit mass")
    }

    pub fn render(&self, profile: &ApprovalProfile) -> Vec<Vec<(String, String)>> {
        self.parts
            .iter()
            .map(|p| {
                (0..p.m())
                    .filter(|&x| !p.share(x).is_zero())
                    .map(|x| (profile.name(x).to_string(), p.share(x).render()))
                    .collect()
            })
            .collect()
    }
}
