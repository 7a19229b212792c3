use num_traits::{One, Zero};

use crate::model::{ApprovalProfile, CandidateId, Decomposition, ExactDistribution, Q};

/// One firing of the weight-growth process.
#[derive(Debug, Clone, PartialEq)]
pub struct FutEvent {
    pub lambda: Q,
    pub fired: Vec<CandidateId>,
}

/// Runs FUT as an exact event simulation.
///
/// All voters start with weight 1. The candidates of maximum score fire first
/// and fix the threshold `t`; their approvers split their budget over the
/// fired candidates they approve and keep weight 1 from then on. The weights
/// of the remaining voters grow together, and an unfired candidate `x` fires
/// when `s_x + u_x·λ = t`, where `s_x` is the frozen weight on `x` and `u_x`
/// counts its unfrozen approvers.
pub fn run_fut(profile: &ApprovalProfile) -> (ExactDistribution, Decomposition, Vec<FutEvent>) {
    let m = profile.m();
    let groups = profile.groups();
    let count = |gi: usize| Q::from_integer(groups[gi].count.into());
    let mut frozen_at: Vec<Option<Q>> = vec![None; groups.len()];
    let mut fired = vec![false; m];
    let mut parts: Vec<Option<ExactDistribution>> = vec![None; groups.len()];
    let mut events = Vec::new();

    let scores: Vec<u64> = (0..m).map(|x| profile.approval_score(x)).collect();
    let top = *scores.iter().max().expect("at least one candidate");
    let threshold = Q::from_integer(top.into());
    let mut level = Q::one();
    let mut firing: Vec<CandidateId> = (0..m).filter(|&x| scores[x] == top).collect();

    loop {
        for &x in &firing {
            fired[x] = true;
        }
        for (gi, g) in groups.iter().enumerate() {
            if frozen_at[gi].is_some() {
                continue;
            }
            let hit: Vec<_> = g.ballot.iter().filter(|x| firing.contains(x)).collect();
            if hit.is_empty() {
                continue;
            }
            let each = Q::new(1.into(), (hit.len() as i64).into());
            let mut shares = vec![Q::zero(); m];
            for x in hit {
                shares[x] = each.clone();
            }
            parts[gi] = Some(ExactDistribution::new(shares).expect("unit split"));
            frozen_at[gi] = Some(level.clone());
        }
        events.push(FutEvent {
            lambda: level.clone(),
            fired: std::mem::take(&mut firing),
        });
        if frozen_at.iter().all(Option::is_some) {
            break;
        }

        let mut best: Option<Q> = None;
        for x in (0..m).filter(|&x| !fired[x]) {
            let mut frozen_mass = Q::zero();
            let mut unfrozen = Q::zero();
            for (gi, g) in groups.iter().enumerate() {
                if !g.ballot.contains(x) {
                    continue;
                }
                match &frozen_at[gi] {
                    Some(l) => frozen_mass += count(gi) * l,
                    None => unfrozen += count(gi),
                }
            }
            if unfrozen.is_zero() {
                continue;
            }
            let lx = (&threshold - frozen_mass) / unfrozen;
            match &best {
                Some(b) if lx > *b => {}
                Some(b) if lx == *b => firing.push(x),
                _ => {
                    best = Some(lx);
                    firing = vec![x];
                }
            }
        }
        level = best.expect("an unfrozen voter approves an unfired candidate");
    }

    let parts = parts.into_iter().map(|p| p.expect("every voter spent")).collect();
    let dec = Decomposition::new(profile, parts).expect("parts lie on ballots");
    (dec.aggregate(profile), dec, events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::q;

    #[test]
    fn wpc_profile_events() {
        let p = ApprovalProfile::from_names(
            &["a", "b", "c"],
            &[(3, &["a"]), (5, &["a", "c"]), (1, &["c"]), (1, &["b", "c"]), (4, &["b"])],
        )
        .unwrap();
        let (d, _, events) = run_fut(&p);
        assert_eq!(d.shares(), &[q(8, 14), q(4, 14), q(2, 14)]);
        let levels: Vec<_> = events.iter().map(|e| e.lambda.clone()).collect();
        assert_eq!(levels, vec![q(1, 1), q(3, 2), q(13, 8)]);
        assert_eq!(events[1].fired, vec![2]);
    }

    #[test]
    fn unanimous_single_event() {
        let p = ApprovalProfile::from_names(&["a", "b"], &[(3, &["a"])]).unwrap();
        let (d, _, events) = run_fut(&p);
        assert_eq!(d, ExactDistribution::point(2, 0));
        assert_eq!(events.len(), 1);
    }
}
