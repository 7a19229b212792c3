use std::cmp::Ordering;

use serde_json::Value;

use crate::model::{ApprovalProfile, CandidateId, Scalar};

/// A fairness factor; unbounded when some blocking voter has zero utility.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor<T> {
    Finite(T),
    Unbounded,
}

impl<T: Scalar> Factor<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Factor::Finite(v) => Some(v),
            Factor::Unbounded => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Factor::Unbounded)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Factor::Finite(v) => v.to_f64(),
            Factor::Unbounded => f64::INFINITY,
        }
    }

    /// Compares with `tol` slack on the float backend.
    pub fn cmp_tol(&self, other: &Self, tol: f64) -> Ordering {
        match (self, other) {
            (Factor::Unbounded, Factor::Unbounded) => Ordering::Equal,
            (Factor::Unbounded, _) => Ordering::Greater,
            (_, Factor::Unbounded) => Ordering::Less,
            (Factor::Finite(a), Factor::Finite(b)) => a.cmp_tol(b, tol),
        }
    }

    /// `self > alpha`: the distribution violates the `alpha` bound.
    pub fn exceeds(&self, alpha: &T, tol: f64) -> bool {
        self.cmp_tol(&Factor::Finite(alpha.clone()), tol) == Ordering::Greater
    }

    pub fn render(&self) -> String {
        match self {
            Factor::Finite(v) => v.render(),
            Factor::Unbounded => "unbounded".into(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Factor::Finite(v) => v.to_json(),
            Factor::Unbounded => Value::String("unbounded".into()),
        }
    }
}

/// A set of voters given as whole groups, plus at most one partial group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoterSet {
    /// `(group index, voters taken from it)`.
    pub members: Vec<(usize, u64)>,
}

impl VoterSet {
    pub fn size(&self) -> u64 {
        self.members.iter().map(|(_, c)| c).sum()
    }

    pub fn groups(&self) -> Vec<usize> {
        self.members.iter().map(|(g, _)| *g).collect()
    }

    /// Voter ids, taking the first voters of each listed group.
    pub fn voter_ids(&self, profile: &ApprovalProfile) -> Vec<u64> {
        let offsets = &profile.group_offsets();
        let mut ids: Vec<u64> = self
            .members
            .iter()
            .flat_map(|&(g, c)| (0..c).map(move |k| offsets[g] + k))
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.members
                .iter()
                .map(|(g, c)| serde_json::json!({"group": g, "voters": c}))
                .collect(),
        )
    }
}

/// Group of voters with a commonly approved candidate and the AFS ratio it attains.
#[derive(Debug, Clone, PartialEq)]
pub struct AfsWitness<T> {
    pub candidate: CandidateId,
    pub voters: VoterSet,
    pub utility_sum: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AfsResult<T> {
    pub factor: Factor<T>,
    pub witness: AfsWitness<T>,
}

/// Blocking coalition and its best deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreWitness<T> {
    pub voters: VoterSet,
    pub deviation: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreResult<T> {
    pub factor: Factor<T>,
    pub witness: CoreWitness<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfResult<T> {
    pub factor: Factor<T>,
    pub candidate: CandidateId,
}
