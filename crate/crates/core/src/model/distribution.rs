use std::cmp::Ordering;

use super::profile::{ApprovalBallot, ApprovalProfile, CandidateId};
use super::scalar::{render_f64, Scalar, Q};
use crate::error::{Error, Result};

/// Tolerance on the total mass of a float distribution.
pub const FLOAT_SUM_TOL: f64 = 1e-9;

/// Nonnegative shares indexed by candidate, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    shares: Vec<T>,
}

pub type ExactDistribution = Distribution<Q>;
pub type FloatDistribution = Distribution<f64>;

impl<T: Scalar> Distribution<T> {
    pub fn new(shares: Vec<T>) -> Result<Self> {
        if shares.is_empty() {
            return Err(Error::model("a distribution needs at least one candidate"));
        }
        for (x, s) in shares.iter().enumerate() {
            let neg = if T::EXACT {
                s.is_negative()
            } else {
                s.to_f64() < -FLOAT_SUM_TOL || !s.to_f64().is_finite()
            };
            if neg {
                return Err(Error::model(format!(
                    "share of candidate {x} is negative: {}",
                    s.render()
                )));
            }
        }
        let total = super::scalar::sum(shares.iter().cloned());
        let ok = if T::EXACT {
            total.is_one()
        } else {
            (total.to_f64() - 1.0).abs() <= FLOAT_SUM_TOL
        };
        if !ok {
            return Err(Error::model(format!(
                "shares sum to {}, not 1",
                total.render()
            )));
        }
        Ok(Distribution { shares })
    }

    /// Point mass on `x` over `m` candidates.
    pub fn point(m: usize, x: CandidateId) -> Self {
        let mut shares = vec![T::zero(); m];
        shares[x] = T::one();
        Distribution { shares }
    }

    pub fn m(&self) -> usize {
        self.shares.len()
    }

    pub fn share(&self, x: CandidateId) -> &T {
        &self.shares[x]
    }

    pub fn shares(&self) -> &[T] {
        &self.shares
    }

    pub fn into_shares(self) -> Vec<T> {
        self.shares
    }

    /// `u_i(p)`: total share of the approved candidates.
    pub fn utility(&self, ballot: &ApprovalBallot) -> Result<T> {
        if ballot.max_index() >= self.m() {
            return Err(Error::model(format!(
                "ballot references candidate index {} outside the distribution",
                ballot.max_index()
            )));
        }
        Ok(super::scalar::sum(ballot.iter().map(|x| self.shares[x].clone())))
    }

    /// Utility of every group in profile order.
    pub fn group_utilities(&self, profile: &ApprovalProfile) -> Result<Vec<T>> {
        profile
            .groups()
            .iter()
            .map(|g| self.utility(&g.ballot))
            .collect()
    }

    pub fn to_f64(&self) -> FloatDistribution {
        Distribution {
            shares: self.shares.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn render(&self) -> Vec<String> {
        self.shares.iter().map(Scalar::render).collect()
    }

    /// Tie classes in descending share order; candidates within a class keep declaration order.
    pub fn ranking(&self, tol: f64) -> DistributionRanking {
        let mut order: Vec<CandidateId> = (0..self.m()).collect();
        order.sort_by(|&a, &b| self.shares[b].partial_cmp(&self.shares[a]).unwrap_or(Ordering::Equal));
        let mut classes: Vec<Vec<CandidateId>> = Vec::new();
        for x in order {
            match classes.last_mut() {
                Some(class)
                    if self.shares[class[0]].cmp_tol(&self.shares[x], tol) == Ordering::Equal =>
                {
                    class.push(x)
                }
                _ => classes.push(vec![x]),
            }
        }
        for class in &mut classes {
            class.sort_unstable();
        }
        DistributionRanking { classes }
    }
}

impl ExactDistribution {
    pub fn from_ratios(ratios: &[(i64, i64)]) -> Result<Self> {
        Distribution::new(ratios.iter().map(|&(n, d)| Q::from_ratio(n, d)).collect())
    }
}

impl FloatDistribution {
    /// Clips tiny negatives and rescales to unit mass.
    pub fn normalized(shares: Vec<f64>) -> Result<Self> {
        let clipped: Vec<f64> = shares.into_iter().map(|s| s.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if !(total > 0.0) {
            return Err(Error::model("cannot normalize a distribution with no mass"));
        }
        Distribution::new(clipped.into_iter().map(|s| s / total).collect())
    }

    pub fn render_fixed(&self) -> Vec<String> {
        self.shares.iter().map(|&s| render_f64(s)).collect()
    }
}

/// Weak order over candidates induced by shares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionRanking {
    pub classes: Vec<Vec<CandidateId>>,
}

impl DistributionRanking {
    /// Position of the tie class containing `x` (0 is the top).
    pub fn class_of(&self, x: CandidateId) -> usize {
        self.classes
            .iter()
            .position(|c| c.contains(&x))
            .expect("candidate present in ranking")
    }

    /// `x ≿ y`.
    pub fn weakly_prefers(&self, x: CandidateId, y: CandidateId) -> bool {
        self.class_of(x) <= self.class_of(y)
    }

    /// Tie classes down to and including the class of `x`.
    pub fn prefix(&self, x: CandidateId) -> &[Vec<CandidateId>] {
        &self.classes[..=self.class_of(x)]
    }
}

/// Whether the rankings of `p` and `q` agree when restricted to candidates at least as good as `x`.
pub fn ranking_prefix_equal<T: Scalar>(
    p: &Distribution<T>,
    q: &Distribution<T>,
    x: CandidateId,
    tol: f64,
) -> bool {
    if p.m() != q.m() {
        return false;
    }
    let rp = p.ranking(tol);
    let rq = q.ranking(tol);
    rp.prefix(x) == rq.prefix(x)
}
