use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a candidate in its profile's declaration order.
pub type CandidateId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub index: CandidateId,
    pub name: String,
}

/// A nonempty set of approved candidates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApprovalBallot(BTreeSet<CandidateId>);

impl ApprovalBallot {
    pub fn new(approved: impl IntoIterator<Item = CandidateId>) -> Result<Self> {
        let set: BTreeSet<_> = approved.into_iter().collect();
        if set.is_empty() {
            return Err(Error::model("approval ballots must be nonempty"));
        }
        Ok(ApprovalBallot(set))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: CandidateId) -> bool {
        self.0.contains(&x)
    }

    pub fn iter(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.0.iter().copied()
    }

    pub fn with(&self, x: CandidateId) -> ApprovalBallot {
        let mut set = self.0.clone();
        set.insert(x);
        ApprovalBallot(set)
    }

    pub fn max_index(&self) -> CandidateId {
        *self.0.iter().next_back().expect("nonempty ballot")
    }
}

/// `count` voters who all submitted `ballot`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub ballot: ApprovalBallot,
    pub count: u64,
}

/// Candidate universe plus grouped approval ballots.
///
/// Candidate declaration order is the tie-break order of every rule. Groups
/// with identical ballots are merged on construction, keeping the position of
/// the first occurrence. Voters are numbered consecutively group by group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApprovalProfile {
    candidates: Vec<String>,
    groups: Vec<Group>,
}

impl ApprovalProfile {
    pub fn new(candidates: Vec<String>, groups: Vec<Group>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for name in &candidates {
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::model(format!("invalid candidate name `{name}`")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::model(format!("duplicate candidate `{name}`")));
            }
        }
        let mut merged: Vec<Group> = Vec::with_capacity(groups.len());
        for g in groups {
            if g.count == 0 {
                return Err(Error::model("group counts must be positive"));
            }
            if g.ballot.max_index() >= candidates.len() {
                return Err(Error::model(format!(
                    "ballot references undeclared candidate index {}",
                    g.ballot.max_index()
                )));
            }
            match merged.iter_mut().find(|h| h.ballot == g.ballot) {
                Some(h) => h.count += g.count,
                None => merged.push(g),
            }
        }
        if merged.is_empty() {
            return Err(Error::model("a profile needs at least one voter"));
        }
        Ok(ApprovalProfile {
            candidates,
            groups: merged,
        })
    }

    /// Builds a profile from candidate names and `(count, approved names)` rows.
    pub fn from_names(candidates: &[&str], rows: &[(u64, &[&str])]) -> Result<Self> {
        let names: Vec<String> = candidates.iter().map(|s| s.to_string()).collect();
        let mut groups = Vec::with_capacity(rows.len());
        for (count, ballot) in rows {
            let ids = ballot
                .iter()
                .map(|b| {
                    names
                        .iter()
                        .position(|n| n == b)
                        .ok_or_else(|| Error::model(format!("unknown candidate `{b}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            groups.push(Group {
                ballot: ApprovalBallot::new(ids)?,
                count: *count,
            });
        }
        ApprovalProfile::new(names, groups)
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn candidate(&self, index: CandidateId) -> Candidate {
        Candidate {
            index,
            name: self.candidates[index].clone(),
        }
    }

    pub fn name(&self, x: CandidateId) -> &str {
        &self.candidates[x]
    }

    pub fn candidate_index(&self, name: &str) -> Option<CandidateId> {
        self.candidates.iter().position(|n| n == name)
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    pub fn n(&self) -> u64 {
        self.groups.iter().map(|g| g.count).sum()
    }

    pub fn max_ballot_size(&self) -> usize {
        self.groups.iter().map(|g| g.ballot.len()).max().unwrap_or(0)
    }

    /// `|N_x|`: number of voters approving `x`.
    pub fn approval_score(&self, x: CandidateId) -> u64 {
        self.groups
            .iter()
            .filter(|g| g.ballot.contains(x))
            .map(|g| g.count)
            .sum()
    }

    /// Group index of every voter, in voter-id order.
    pub fn voter_groups(&self) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(gi, g)| std::iter::repeat_n(gi, g.count as usize))
            .collect()
    }

    /// First voter id belonging to each group.
    pub fn group_offsets(&self) -> Vec<u64> {
        let mut acc = 0;
        self.groups
            .iter()
            .map(|g| {
                let start = acc;
                acc += g.count;
                start
            })
            .collect()
    }

    pub fn same_universe(&self, other: &ApprovalProfile) -> bool {
        self.candidates == other.candidates
    }

    /// Voter-disjoint union `A + A'`.
    pub fn combine(&self, other: &ApprovalProfile) -> Result<ApprovalProfile> {
        if !self.same_universe(other) {
            return Err(Error::model(
                "cannot combine profiles over different candidate lists",
            ));
        }
        let groups = self
            .groups
            .iter()
            .chain(other.groups.iter())
            .cloned()
            .collect();
        ApprovalProfile::new(self.candidates.clone(), groups)
    }

    /// Every group count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> ApprovalProfile {
        assert!(factor > 0, "scale factor must be positive");
        ApprovalProfile {
            candidates: self.candidates.clone(),
            groups: self
                .groups
                .iter()
                .map(|g| Group {
                    ballot: g.ballot.clone(),
                    count: g.count * factor,
                })
                .collect(),
        }
    }

    /// Moves one voter of group `group` to the ballot extended by `x`.
    pub fn with_added_approval(&self, group: usize, x: CandidateId) -> Result<ApprovalProfile> {
        let g = self
            .groups
            .get(group)
            .ok_or_else(|| Error::Precondition(format!("no voter group {group}")))?;
        if x >= self.m() {
            return Err(Error::Precondition(format!("no candidate with index {x}")));
        }
        if g.ballot.contains(x) {
            return Err(Error::Precondition(format!(
                "candidate {} is already approved by group {group}",
                self.candidates[x]
            )));
        }
        let extended = g.ballot.with(x);
        let mut groups = self.groups.clone();
        groups[group].count -= 1;
        groups.push(Group {
            ballot: extended,
            count: 1,
        });
        groups.retain(|g| g.count > 0);
        ApprovalProfile::new(self.candidates.clone(), groups)
    }

    /// The unique candidate approved by every voter, if there is exactly one.
    pub fn unique_common_candidate(&self) -> Option<CandidateId> {
        let mut common: Option<BTreeSet<CandidateId>> = None;
        for g in &self.groups {
            let set: BTreeSet<_> = g.ballot.iter().collect();
            common = Some(match common {
                None => set,
                Some(c) => c.intersection(&set).copied().collect(),
            });
        }
        let common = common?;
        if common.len() == 1 {
            common.into_iter().next()
        } else {
            None
        }
    }

    pub fn ballot_names(&self, ballot: &ApprovalBallot) -> Vec<&str> {
        ballot.iter().map(|x| self.candidates[x].as_str()).collect()
    }
}

impl fmt::Display for ApprovalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "candidates: {}", self.candidates.join(" "))?;
        for g in &self.groups {
            writeln!(f, "{}: {}", g.count, self.ballot_names(&g.ballot).join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_example() -> ApprovalProfile {
        ApprovalProfile::from_names(
            &["a", "b", "c", "d"],
            &[
                (4, &["a", "b"]),
                (4, &["a"]),
                (2, &["b", "c"]),
                (1, &["c", "d"]),
                (1, &["d"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn scores() {
        let p = map_example();
        assert_eq!(p.n(), 12);
        assert_eq!(p.approval_score(0), 8);
        assert_eq!(p.approval_score(3), 2);
        let lonely =
            ApprovalProfile::from_names(&["a", "x"], &[(3, &["a"])]).unwrap();
        assert_eq!(lonely.approval_score(1), 0);
        let all = ApprovalProfile::from_names(&["a", "b"], &[(2, &["a", "b"]), (5, &["a", "b"])])
            .unwrap();
        assert_eq!(all.approval_score(1), all.n());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ApprovalBallot::new(Vec::<usize>::new()).is_err());
        assert!(ApprovalProfile::from_names(&["a", "a"], &[(1, &["a"])]).is_err());
        assert!(ApprovalProfile::from_names(&["a"], &[(1, &["b"])]).is_err());
        assert!(ApprovalProfile::from_names(&["a"], &[(0, &["a"])]).is_err());
        assert!(ApprovalProfile::from_names(&["a"], &[]).is_err());
    }

    #[test]
    fn self_combine_doubles() {
        let p = map_example();
        let pp = p.combine(&p).unwrap();
        assert_eq!(pp, p.scaled(2));
    }

    #[test]
    fn combine_cut_pair() {
        let c = ["a", "b", "c"];
        let a = ApprovalProfile::from_names(
            &c,
            &[(2, &["a"]), (4, &["a", "c"]), (1, &["c"]), (3, &["b"])],
        )
        .unwrap();
        let b = ApprovalProfile::from_names(
            &c,
            &[(6, &["a"]), (2, &["b"]), (1, &["b", "c"]), (1, &["c"])],
        )
        .unwrap();
        let ab = a.combine(&b).unwrap();
        assert_eq!(ab.n(), 20);
        assert_eq!(ab.approval_score(2), 7);
        assert_eq!(ab.approval_score(1), 6);
    }

    #[test]
    fn combine_requires_same_universe() {
        let a = ApprovalProfile::from_names(&["a", "b"], &[(1, &["a"])]).unwrap();
        let b = ApprovalProfile::from_names(&["b", "a"], &[(1, &["a"])]).unwrap();
        assert!(a.combine(&b).is_err());
    }

    #[test]
    fn added_approval_splits_one_voter() {
        let p = map_example();
        let q = p.with_added_approval(1, 2).unwrap();
        assert_eq!(q.n(), 12);
        assert_eq!(q.approval_score(2), p.approval_score(2) + 1);
        assert!(p.with_added_approval(0, 0).is_err());
    }

    #[test]
    fn unique_common() {
        let p = ApprovalProfile::from_names(&["a", "b", "c"], &[(1, &["a", "b"]), (1, &["a", "c"])])
            .unwrap();
        assert_eq!(p.unique_common_candidate(), Some(0));
        let p = ApprovalProfile::from_names(&["a", "b"], &[(1, &["a", "b"])]).unwrap();
        assert_eq!(p.unique_common_candidate(), None);
    }
}
