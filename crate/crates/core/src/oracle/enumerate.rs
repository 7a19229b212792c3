use crate::error::{Error, Result};
use crate::fairness::{AfsResult, AfsWitness, CoreResult, CoreWitness, Factor, VoterSet};
use crate::model::{ApprovalProfile, Distribution, Scalar};

use super::lp::{lp_maximin, MaximinLp};

/// Largest electorate accepted by [`enumerate_afs`].
pub const AFS_LIMIT: usize = 20;
/// Default electorate limit for exact core computations.
pub const CORE_LIMIT: usize = 14;

/// Which deviations a blocking coalition may propose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deviations {
    All,
    PointMass,
}

fn ballot_mask(profile: &ApprovalProfile) -> Result<Vec<u128>> {
    if profile.m() > 128 {
        return Err(Error::Precondition(
            "exhaustive oracles support at most 128 candidates".into(),
        ));
    }
    Ok(profile
        .groups()
        .iter()
        .map(|g| g.ballot.iter().fold(0u128, |acc, x| acc | (1 << x)))
        .collect())
}

fn check_size(n: u64, limit: usize) -> Result<()> {
    if n > limit as u64 {
        return Err(Error::TooLarge {
            n: n as usize,
            limit,
        });
    }
    Ok(())
}

fn ratio<T: Scalar>(num: u64, den: u64) -> T {
    T::from_ratio(num as i64, den as i64)
}

fn members_from_voters(groups_of: &[usize], voters: &[usize]) -> VoterSet {
    let mut members: Vec<(usize, u64)> = Vec::new();
    for &v in voters {
        let g = groups_of[v];
        match members.iter_mut().find(|(h, _)| *h == g) {
            Some(m) => m.1 += 1,
            None => members.push((g, 1)),
        }
    }
    VoterSet { members }
}

struct AfsSearch<T> {
    masks: Vec<u128>,
    utils: Vec<T>,
    n: u64,
    best: Option<(Factor<T>, Vec<usize>, u128, T)>,
}

impl<T: Scalar> AfsSearch<T> {
    fn visit(&mut self, start: usize, chosen: &mut Vec<usize>, inter: u128, sum: T) {
        for v in start..self.masks.len() {
            let next = inter & self.masks[v];
            if next == 0 {
                continue;
            }
            let s = sum.clone() + self.utils[v].clone();
            chosen.push(v);
            let k = chosen.len() as u64;
            let factor = if s.is_zero() {
                Factor::Unbounded
            } else {
                Factor::Finite(ratio::<T>(k * k, self.n) / s.clone())
            };
            let improves = match &self.best {
                None => true,
                Some((b, ..)) => factor.cmp_tol(b, 0.0) == std::cmp::Ordering::Greater,
            };
            if improves {
                self.best = Some((factor, chosen.clone(), next, s.clone()));
            }
            self.visit(v + 1, chosen, next, s);
            chosen.pop();
        }
    }
}

/// Exact AFS factor by enumerating every voter subset with a common candidate.
pub fn enumerate_afs<T: Scalar>(
    profile: &ApprovalProfile,
    p: &Distribution<T>,
    limit_n: usize,
) -> Result<AfsResult<T>> {
    check_size(profile.n(), limit_n.min(AFS_LIMIT))?;
    let group_masks = ballot_mask(profile)?;
    let group_utils = p.group_utilities(profile)?;
    let groups_of = profile.voter_groups();
    let mut search = AfsSearch {
        masks: groups_of.iter().map(|&g| group_masks[g]).collect(),
        utils: groups_of.iter().map(|&g| group_utils[g].clone()).collect(),
        n: profile.n(),
        best: None,
    };
    search.visit(0, &mut Vec::new(), u128::MAX, T::zero());
    let (factor, voters, inter, utility_sum) = search.best.expect("a single voter always qualifies");
    Ok(AfsResult {
        factor,
        witness: AfsWitness {
            candidate: inter.trailing_zeros() as usize,
            voters: members_from_voters(&groups_of, &voters),
            utility_sum,
        },
    })
}

/// Best deviation value `t*(S)` of a coalition and a deviation attaining it.
fn coalition_value<T: Scalar>(
    profile: &ApprovalProfile,
    utils: &[T],
    masks: &[u128],
    members: &[(usize, u64)],
    deviations: Deviations,
) -> Result<(T, Vec<T>)> {
    let n = profile.n();
    let size: u64 = members.iter().map(|(_, c)| c).sum();
    let scale = ratio::<T>(size, n);
    let m = profile.m();
    match deviations {
        Deviations::PointMass => {
            let common = members.iter().fold(u128::MAX, |acc, (g, _)| acc & masks[*g]);
            if common == 0 {
                let mut q = vec![T::zero(); m];
                q[0] = T::one();
                return Ok((T::zero(), q));
            }
            let max_u = members
                .iter()
                .map(|(g, _)| utils[*g].clone())
                .fold(T::zero(), |a, b| if b > a { b } else { a });
            let x = common.trailing_zeros() as usize;
            let mut q = vec![T::zero(); m];
            q[x] = T::one();
            Ok((scale / max_u, q))
        }
        Deviations::All => {
            let cols: Vec<usize> = (0..m)
                .filter(|&x| members.iter().any(|(g, _)| masks[*g] >> x & 1 == 1))
                .collect();
            let rows = members
                .iter()
                .map(|(g, _)| {
                    let w = scale.clone() / utils[*g].clone();
                    cols.iter()
                        .map(|&x| if masks[*g] >> x & 1 == 1 { w.clone() } else { T::zero() })
                        .collect()
                })
                .collect();
            let sol = lp_maximin(&MaximinLp { rows })?;
            let mut q = vec![T::zero(); m];
            for (c, &x) in cols.iter().enumerate() {
                q[x] = sol.q[c].clone();
            }
            Ok((sol.value, q))
        }
    }
}

fn zero_utility_witness<T: Scalar>(
    profile: &ApprovalProfile,
    utils: &[T],
) -> Option<CoreResult<T>> {
    let g = utils.iter().position(|u| u.is_zero())?;
    let x = profile.groups()[g].ballot.iter().next().expect("nonempty");
    let mut q = vec![T::zero(); profile.m()];
    q[x] = T::one();
    Some(CoreResult {
        factor: Factor::Unbounded,
        witness: CoreWitness {
            voters: VoterSet {
                members: vec![(g, 1)],
            },
            deviation: q,
        },
    })
}

/// Exact core factor: the largest `t` such that some coalition `S` has a
/// distribution `q` with `(|S|/n)·u_i(q) ≥ t·u_i(p)` for all `i ∈ S`.
///
/// The LP value of a coalition depends only on which ballots it contains and
/// grows with its size, so it suffices to enumerate sets of whole groups.
pub fn enumerate_core<T: Scalar>(
    profile: &ApprovalProfile,
    p: &Distribution<T>,
    limit_n: usize,
    deviations: Deviations,
) -> Result<CoreResult<T>> {
    check_size(profile.n(), limit_n)?;
    let utils = p.group_utilities(profile)?;
    if let Some(w) = zero_utility_witness(profile, &utils) {
        return Ok(w);
    }
    let masks = ballot_mask(profile)?;
    let groups = profile.groups();
    let n = profile.n();
    let mut best = T::one();
    let mut witness = CoreWitness {
        voters: VoterSet {
            members: groups.iter().enumerate().map(|(g, h)| (g, h.count)).collect(),
        },
        deviation: p.shares().to_vec(),
    };
    let total = groups.len();
    if total > 30 {
        return Err(Error::TooLarge { n: total, limit: 30 });
    }
    for mask in 1u64..(1u64 << total) {
        let members: Vec<(usize, u64)> = (0..total)
            .filter(|g| mask >> g & 1 == 1)
            .map(|g| (g, groups[g].count))
            .collect();
        let size: u64 = members.iter().map(|(_, c)| c).sum();
        let max_u = members
            .iter()
            .map(|(g, _)| utils[*g].clone())
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        if ratio::<T>(size, n) / max_u <= best {
            continue;
        }
        let (value, q) = coalition_value(profile, &utils, &masks, &members, deviations)?;
        if value > best {
            best = value;
            witness = CoreWitness {
                voters: VoterSet { members },
                deviation: q,
            };
        }
    }
    Ok(CoreResult {
        factor: Factor::Finite(best),
        witness,
    })
}

/// Reference version of [`enumerate_core`] that enumerates individual voters.
pub fn enumerate_core_voters<T: Scalar>(
    profile: &ApprovalProfile,
    p: &Distribution<T>,
    limit_n: usize,
) -> Result<Factor<T>> {
    check_size(profile.n(), limit_n.min(AFS_LIMIT))?;
    let utils = p.group_utilities(profile)?;
    if utils.iter().any(|u| u.is_zero()) {
        return Ok(Factor::Unbounded);
    }
    let masks = ballot_mask(profile)?;
    let groups_of = profile.voter_groups();
    let mut best = T::one();
    for mask in 1u64..(1u64 << groups_of.len()) {
        let voters: Vec<usize> = (0..groups_of.len()).filter(|v| mask >> v & 1 == 1).collect();
        let members = members_from_voters(&groups_of, &voters).members;
        let (value, _) = coalition_value(profile, &utils, &masks, &members, Deviations::All)?;
        if value > best {
            best = value;
        }
    }
    Ok(Factor::Finite(best))
}
