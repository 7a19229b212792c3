use crate::error::Result;
use crate::model::{ApprovalProfile, Distribution, Scalar};
use crate::oracle::{enumerate_afs, enumerate_core, Deviations};

use super::factor::{AfsResult, AfsWitness, CoreResult, CoreWitness, Factor, PfResult, VoterSet};

fn ratio<T: Scalar>(num: u64, den: u64) -> T {
    T::from_ratio(num as i64, den as i64)
}

/// Approver groups of `x`, ordered by increasing utility.
fn sorted_approvers<T: Scalar>(profile: &ApprovalProfile, utils: &[T], x: usize) -> Vec<usize> {
    let mut gs: Vec<usize> = (0..profile.groups().len())
        .filter(|&g| profile.groups()[g].ballot.contains(x))
        .collect();
    gs.sort_by(|&a, &b| utils[a].partial_cmp(&utils[b]).expect("comparable utilities"));
    gs
}

fn take_prefix(profile: &ApprovalProfile, order: &[usize], upto: usize, last: u64) -> VoterSet {
    let mut members: Vec<(usize, u64)> = order[..upto]
        .iter()
        .map(|&g| (g, profile.groups()[g].count))
        .collect();
    members.push((order[upto], last));
    VoterSet { members }
}

/// Smallest `α` for which `p` satisfies `α`-AFS.
///
/// For a fixed common candidate the demand `|S|²/n` depends only on `|S|`, so
/// the worst coalition of each size consists of the lowest-utility approvers.
/// Within a run of equal utilities the ratio is convex in the size, so only
/// the run endpoints need checking.
pub fn afs_factor<T: Scalar>(profile: &ApprovalProfile, p: &Distribution<T>) -> Result<AfsResult<T>> {
    let utils = p.group_utilities(profile)?;
    let n = profile.n();
    let mut best: Option<AfsResult<T>> = None;
    for x in 0..profile.m() {
        let order = sorted_approvers(profile, &utils, x);
        let mut before = 0u64;
        let mut sum = T::zero();
        for (idx, &g) in order.iter().enumerate() {
            let count = profile.groups()[g].count;
            let ends = if count == 1 { vec![1] } else { vec![1, count] };
            for take in ends {
                let k = before + take;
                let s = sum.clone() + utils[g].clone() * ratio::<T>(take, 1);
                let factor = if s.is_zero() {
                    Factor::Unbounded
                } else {
                    Factor::Finite(ratio::<T>(k * k, n) / s.clone())
                };
                let improves = best.as_ref().is_none_or(|b| {
                    factor.cmp_tol(&b.factor, 0.0) == std::cmp::Ordering::Greater
                });
                if improves {
                    best = Some(AfsResult {
                        factor,
                        witness: AfsWitness {
                            candidate: x,
                            voters: take_prefix(profile, &order, idx, take),
                            utility_sum: s,
                        },
                    });
                }
            }
            before += count;
            sum = sum + utils[g].clone() * ratio::<T>(count, 1);
        }
    }
    Ok(best.expect("every profile has an approved candidate"))
}

/// Exhaustive AFS factor; refuses electorates above `limit_n` (at most 20).
pub fn brute_afs<T: Scalar>(
    profile: &ApprovalProfile,
    p: &Distribution<T>,
    limit_n: usize,
) -> Result<AfsResult<T>> {
    enumerate_afs(profile, p, limit_n)
}

/// `max_x (1/n) Σ_{i∈N_x} 1/u_i(p)`, an upper bound on the core factor.
pub fn pf_score<T: Scalar>(profile: &ApprovalProfile, p: &Distribution<T>) -> Result<PfResult<T>> {
    let utils = p.group_utilities(profile)?;
    let n = ratio::<T>(profile.n(), 1);
    let mut best: Option<PfResult<T>> = None;
    for x in 0..profile.m() {
        let mut total = T::zero();
        let mut unbounded = false;
        for (g, grp) in profile.groups().iter().enumerate() {
            if grp.ballot.contains(x) {
                if utils[g].is_zero() {
                    unbounded = true;
                    break;
                }
                total = total + ratio::<T>(grp.count, 1) / utils[g].clone();
            }
        }
        let factor = if unbounded {
            Factor::Unbounded
        } else {
            Factor::Finite(total / n.clone())
        };
        let improves = best
            .as_ref()
            .is_none_or(|b| factor.cmp_tol(&b.factor, 0.0) == std::cmp::Ordering::Greater);
        if improves {
            best = Some(PfResult { factor, candidate: x });
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Core lower bound from point-mass deviations: `S` is the `k` lowest-utility
/// approvers of `x`, deviating to `x` alone.
pub fn core_lower_single<T: Scalar>(
    profile: &ApprovalProfile,
    p: &Distribution<T>,
) -> Result<CoreResult<T>> {
    let utils = p.group_utilities(profile)?;
    let n = profile.n();
    let mut best: Option<CoreResult<T>> = None;
    for x in 0..profile.m() {
        let order = sorted_approvers(profile, &utils, x);
        let mut k = 0u64;
        for (idx, &g) in order.iter().enumerate() {
            let count = profile.groups()[g].count;
            k += count;
            let factor = if utils[g].is_zero() {
                Factor::Unbounded
            } else {
                Factor::Finite(ratio::<T>(k, n) / utils[g].clone())
            };
            let improves = best
                .as_ref()
                .is_none_or(|b| factor.cmp_tol(&b.factor, 0.0) == std::cmp::Ordering::Greater);
            if improves {
                let mut q = vec![T::zero(); profile.m()];
                q[x] = T::one();
                best = Some(CoreResult {
                    factor,
                    witness: CoreWitness {
                        voters: take_prefix(profile, &order, idx, count),
                        deviation: q,
                    },
                });
            }
        }
    }
    Ok(best.expect("at least one approved candidate"))
}

/// `min_{i∈S} (|S|/n)·u_i(q)/u_i(p)`: how far coalition `S` improves on `p`
/// by spending its own shares on `q`.
pub fn deviation_ratio<T: Scalar>(
    profile: &ApprovalProfile,
    p: &Distribution<T>,
    coalition: &VoterSet,
    q: &Distribution<T>,
) -> Result<Factor<T>> {
    let up = p.group_utilities(profile)?;
    let uq = q.group_utilities(profile)?;
    let weight = ratio::<T>(coalition.size(), profile.n());
    let mut worst: Option<Factor<T>> = None;
    for &(g, c) in &coalition.members {
        if c == 0 {
            continue;
        }
        let f = if up[g].is_zero() {
            if uq[g].is_zero() {
                Factor::Finite(T::zero())
            } else {
                Factor::Unbounded
            }
        } else {
            Factor::Finite(weight.clone() * uq[g].clone() / up[g].clone())
        };
        if worst.as_ref().is_none_or(|w| f.cmp_tol(w, 0.0) == std::cmp::Ordering::Less) {
            worst = Some(f);
        }
    }
    Ok(worst.unwrap_or(Factor::Finite(T::zero())))
}

/// Exact core factor for electorates of at most `limit_n` voters.
pub fn core_exact<T: Scalar>(
    profile: &ApprovalProfile,
    p: &Distribution<T>,
    limit_n: usize,
) -> Result<CoreResult<T>> {
    enumerate_core(profile, p, limit_n, Deviations::All)
}
