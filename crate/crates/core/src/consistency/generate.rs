use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::model::{ApprovalBallot, ApprovalProfile, CandidateId, Group};

/// Bounds for random profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub max_voters: u64,
    pub max_candidates: usize,
    pub max_ballot: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_voters: 12,
            max_candidates: 6,
            max_ballot: 4,
        }
    }
}

impl GeneratorConfig {
    /// Tightens the ballot bound, keeping at least one.
    pub fn with_ballot_cap(mut self, cap: usize) -> Self {
        self.max_ballot = self.max_ballot.min(cap).max(1);
        self
    }
}

pub fn candidate_names(m: usize) -> Vec<String> {
    (0..m)
        .map(|i| {
            if m <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("c{}", i + 1)
            }
        })
        .collect()
}

fn random_ballot<R: Rng>(rng: &mut R, m: usize, max_ballot: usize) -> ApprovalBallot {
    let k = rng.gen_range(1..=max_ballot.min(m).max(1));
    ApprovalBallot::new(index::sample(rng, m, k)).expect("nonempty sample")
}

fn profile_from_ballots(m: usize, ballots: Vec<ApprovalBallot>) -> ApprovalProfile {
    let groups = ballots.into_iter().map(|ballot| Group { ballot, count: 1 }).collect();
    ApprovalProfile::new(candidate_names(m), groups).expect("valid random profile")
}

/// The largest allowed ballot avoiding `hub` (or containing it when `m = 1`).
fn wide_ballot<R: Rng>(rng: &mut R, m: usize, hub: CandidateId, max_ballot: usize) -> ApprovalBallot {
    let others: Vec<CandidateId> = (0..m).filter(|&x| x != hub).collect();
    if others.is_empty() {
        return ApprovalBallot::new([hub]).expect("nonempty");
    }
    let k = max_ballot.min(others.len()).max(1);
    ApprovalBallot::new(others.choose_multiple(rng, k).copied()).expect("nonempty")
}

/// Voters are drawn in one of three styles: independent ballots, a pool of
/// at most three shared ballots, or a mix of one wide ballot avoiding a hub
/// candidate with pairs joining the hub to one of its members.
fn random_voters<R: Rng>(rng: &mut R, m: usize, n: u64, cfg: &GeneratorConfig) -> ApprovalProfile {
    let pool: Vec<ApprovalBallot> = (0..rng.gen_range(1..=3))
        .map(|_| random_ballot(rng, m, cfg.max_ballot))
        .collect();
    let style = rng.gen_range(0..3);
    let hub = rng.gen_range(0..m);
    let wide = wide_ballot(rng, m, hub, cfg.max_ballot);
    let ballots = (0..n)
        .map(|_| match style {
            0 => random_ballot(rng, m, cfg.max_ballot),
            1 => pool.choose(rng).expect("nonempty pool").clone(),
            _ if !wide.contains(hub) && cfg.max_ballot > 1 && rng.gen_bool(0.5) => {
                let other = *wide.iter().collect::<Vec<_>>().choose(rng).expect("nonempty");
                ApprovalBallot::new([hub, other]).expect("nonempty pair")
            }
            _ => wide.clone(),
        })
        .collect();
    profile_from_ballots(m, ballots)
}

fn random_m<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> usize {
    let hi = cfg.max_candidates.max(1);
    rng.gen_range(hi.min(2)..=hi)
}

/// A profile with `1..=max_voters` voters over `m ≤ max_candidates` candidates.
pub fn random_profile<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> ApprovalProfile {
    let m = random_m(rng, cfg);
    let n = rng.gen_range(1..=cfg.max_voters.max(1));
    random_voters(rng, m, n, cfg)
}

/// Two profiles on a common universe, each within the voter bound.
///
/// A third of the pairs repeat the first profile, a third change one voter's
/// ballot, and the rest are independent.
pub fn random_pair<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> (ApprovalProfile, ApprovalProfile) {
    let m = random_m(rng, cfg);
    let n = rng.gen_range(1..=cfg.max_voters.max(1));
    let a = random_voters(rng, m, n, cfg);
    let b = match rng.gen_range(0..3) {
        0 => a.clone(),
        1 => {
            let mut ballots: Vec<ApprovalBallot> = a
                .groups()
                .iter()
                .flat_map(|g| std::iter::repeat_n(g.ballot.clone(), g.count as usize))
                .collect();
            let i = rng.gen_range(0..ballots.len());
            ballots[i] = random_ballot(rng, m, cfg.max_ballot);
            profile_from_ballots(m, ballots)
        }
        _ => {
            let nb = rng.gen_range(1..=cfg.max_voters.max(1));
            random_voters(rng, m, nb, cfg)
        }
    };
    (a, b)
}

/// A profile and one voter group that can approve one more candidate.
/// Redraws while every ballot is full; `None` after 64 attempts.
pub fn random_step<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> Option<(ApprovalProfile, usize, CandidateId)> {
    let cfg = cfg.with_ballot_cap(cfg.max_ballot.saturating_sub(1));
    for _ in 0..64 {
        let p = random_profile(rng, &cfg);
        let open: Vec<usize> = (0..p.groups().len())
            .filter(|&g| p.groups()[g].ballot.len() < p.m())
            .collect();
        if let Some(&g) = open.choose(rng) {
            let missing: Vec<CandidateId> = (0..p.m()).filter(|&x| !p.groups()[g].ballot.contains(x)).collect();
            let &x = missing.choose(rng).expect("open ballot");
            return Some((p, g, x));
        }
    }
    None
}

/// A profile in which one candidate is added to every ballot.
pub fn random_unanimous<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> ApprovalProfile {
    let p = random_profile(rng, &cfg.with_ballot_cap(cfg.max_ballot.saturating_sub(1)));
    let x = rng.gen_range(0..p.m());
    let ballots = p
        .groups()
        .iter()
        .flat_map(|g| std::iter::repeat_n(g.ballot.with(x), g.count as usize))
        .collect();
    profile_from_ballots(p.m(), ballots)
}
