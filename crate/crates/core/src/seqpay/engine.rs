use num_traits::Zero;
use serde_json::{json, Value};

use super::willingness::PaymentWillingness;
use crate::error::{Error, Result};
use crate::model::{ApprovalProfile, CandidateId, Decomposition, ExactDistribution, Group, Scalar, Q};

/// What every voter of one group paid in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPayment {
    pub group: usize,
    pub count: u64,
    pub per_voter: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub index: usize,
    pub candidate: CandidateId,
    /// `Π(x, X)`: total willingness of the selected candidate.
    pub total: Q,
    pub payments: Vec<GroupPayment>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleTrace {
    pub rule: String,
    groups: Vec<Group>,
    pub rounds: Vec<Round>,
}

impl RuleTrace {
    pub fn n(&self) -> u64 {
        self.groups.iter().map(|g| g.count).sum()
    }

    /// Candidates in selection order.
    pub fn order(&self) -> Vec<CandidateId> {
        self.rounds.iter().map(|r| r.candidate).collect()
    }

    /// `(voter id, payment)` pairs of one round, expanding groups.
    pub fn voter_payments(&self, round: usize) -> Vec<(u64, Q)> {
        let mut offsets = Vec::with_capacity(self.groups.len());
        let mut acc = 0;
        for g in &self.groups {
            offsets.push(acc);
            acc += g.count;
        }
        let offsets = &offsets;
        self.rounds[round]
            .payments
            .iter()
            .flat_map(|p| (0..p.count).map(move |k| (offsets[p.group] + k, p.per_voter.clone())))
            .collect()
    }

    pub fn to_json(&self, profile: &ApprovalProfile) -> Value {
        Value::Array(
            self.rounds
                .iter()
                .map(|r| {
                    json!({
                        "round": r.index + 1,
                        "candidate": profile.name(r.candidate),
                        "total": r.total.render(),
                        "payments": r.payments.iter().map(|p| json!({
                            "group": p.group,
                            "voters": p.count,
                            "per_voter": p.per_voter.render(),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

/// Runs the sequential payment rule defined by `pi` on `profile`.
///
/// Each round funds the unfunded candidate with the largest total willingness
/// `Σ_{i∈N_x} π(|A_i|, |A_i∩X|+1)`, breaking ties by declaration order, and
/// gives it that total divided by `n`. All `m` rounds run.
pub fn run_sequential(
    profile: &ApprovalProfile,
    pi: &PaymentWillingness,
) -> Result<(ExactDistribution, RuleTrace)> {
    pi.check_covers(profile.max_ballot_size())?;
    let m = profile.m();
    let groups = profile.groups();
    let n = Q::from_integer(profile.n().into());
    // funded[g] = |A_g ∩ X|
    let mut funded = vec![0usize; groups.len()];
    let mut selected = vec![false; m];
    let mut shares = vec![Q::zero(); m];
    let mut rounds = Vec::with_capacity(m);
    let pay = |g: &Group, k: usize| pi.pi(g.ballot.len(), k + 1);

    for index in 0..m {
        let mut best: Option<(CandidateId, Q)> = None;
        for x in (0..m).filter(|&x| !selected[x]) {
            let total = groups
                .iter()
                .zip(&funded)
                .filter(|(g, _)| g.ballot.contains(x))
                .fold(Q::zero(), |acc, (g, &k)| {
                    acc + pay(g, k) * Q::from_integer(g.count.into())
                });
            if best.as_ref().is_none_or(|(_, b)| total > *b) {
                best = Some((x, total));
            }
        }
        let (x, total) = best.expect("an unfunded candidate remains");
        let mut payments = Vec::new();
        for (gi, g) in groups.iter().enumerate() {
            if g.ballot.contains(x) {
                let per_voter = pay(g, funded[gi]);
                funded[gi] += 1;
                if !per_voter.is_zero() {
                    payments.push(GroupPayment {
                        group: gi,
                        count: g.count,
                        per_voter,
                    });
                }
            }
        }
        selected[x] = true;
        shares[x] = &total / &n;
        rounds.push(Round {
            index,
            candidate: x,
            total,
            payments,
        });
    }
    let dist = ExactDistribution::new(shares)?;
    let trace = RuleTrace {
        rule: pi.name().to_string(),
        groups: groups.to_vec(),
        rounds,
    };
    Ok((dist, trace))
}

/// Individual distributions read off a trace: `p^i(x)` is what voter `i` paid for `x`.
pub fn decomposition_from_trace(trace: &RuleTrace, profile: &ApprovalProfile) -> Result<Decomposition> {
    if trace.groups != profile.groups() || trace.rounds.len() != profile.m() {
        return Err(Error::TraceMismatch(format!(
            "trace of `{}` was recorded on a different profile",
            trace.rule
        )));
    }
    let mut parts = vec![vec![Q::zero(); profile.m()]; profile.groups().len()];
    for r in &trace.rounds {
        for p in &r.payments {
            parts[p.group][r.candidate] += &p.per_voter;
        }
    }
    let parts = parts
        .into_iter()
        .map(ExactDistribution::new)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::TraceMismatch(e.to_string()))?;
    Decomposition::new(profile, parts)
}
