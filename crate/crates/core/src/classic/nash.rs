use crate::error::{Error, Result};
use crate::model::{ApprovalProfile, CandidateId, FloatDistribution};
use crate::seqpay::{run_sequential, willingness_ues};

#[derive(Debug, Clone, PartialEq)]
pub struct NashSolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Starting point; `None` means the UES outcome.
    pub initialization: Option<FloatDistribution>,
}

impl Default for NashSolverConfig {
    fn default() -> Self {
        NashSolverConfig {
            tolerance: 1e-10,
            max_iterations: 200_000,
            initialization: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashOutcome {
    pub distribution: FloatDistribution,
    pub iterations: usize,
    pub residual: f64,
    /// Candidates dropped from the support by the active-set step.
    pub pruned: Vec<CandidateId>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NashViolationKind {
    /// `score(x) > n + tol`: moving mass to `x` raises Nash welfare.
    ScoreAboveN,
    /// `p(x) > tol` but `score(x) < n - tol`.
    SlackOnSupport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashViolation {
    pub candidate: CandidateId,
    pub score: f64,
    pub share: f64,
    pub kind: NashViolationKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashReport {
    pub ok: bool,
    pub n: f64,
    /// `score(x) = Σ_{i∈N_x} 1/u_i(p)`; empty when some utility is zero.
    pub scores: Vec<f64>,
    pub violations: Vec<NashViolation>,
    /// Groups with zero utility, which make the log-welfare `-∞`.
    pub zero_utility_groups: Vec<usize>,
}

fn utilities(profile: &ApprovalProfile, p: &[f64]) -> Vec<f64> {
    profile
        .groups()
        .iter()
        .map(|g| g.ballot.iter().map(|x| p[x]).sum())
        .collect()
}

fn scores(profile: &ApprovalProfile, u: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; profile.m()];
    for (g, ui) in profile.groups().iter().zip(u) {
        let w = g.count as f64 / ui;
        for x in g.ballot.iter() {
            s[x] += w;
        }
    }
    s
}

/// Checks the first-order optimality conditions of `max Σ_i log u_i(p)`.
pub fn verify_nash(profile: &ApprovalProfile, p: &FloatDistribution, tol: f64) -> NashReport {
    let n = profile.n() as f64;
    let u = utilities(profile, p.shares());
    let zero: Vec<usize> = u.iter().enumerate().filter(|(_, &v)| v <= 0.0).map(|(i, _)| i).collect();
    if !zero.is_empty() {
        return NashReport {
            ok: false,
            n,
            scores: Vec::new(),
            violations: Vec::new(),
            zero_utility_groups: zero,
        };
    }
    let s = scores(profile, &u);
    let mut violations = Vec::new();
    for (x, (&sx, &px)) in s.iter().zip(p.shares()).enumerate() {
        let kind = if sx > n + tol {
            Some(NashViolationKind::ScoreAboveN)
        } else if px > tol && sx < n - tol {
            Some(NashViolationKind::SlackOnSupport)
        } else {
            None
        };
        if let Some(kind) = kind {
            violations.push(NashViolation {
                candidate: x,
                score: sx,
                share: px,
                kind,
            });
        }
    }
    NashReport {
        ok: violations.is_empty(),
        n,
        scores: s,
        violations,
        zero_utility_groups: Vec::new(),
    }
}

/// One proportional-response step; returns the max-norm change.
fn step(profile: &ApprovalProfile, p: &mut [f64]) -> Option<f64> {
    let u = utilities(profile, p);
    if u.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let n = profile.n() as f64;
    let s = scores(profile, &u);
    let mut next: Vec<f64> = p.iter().zip(&s).map(|(px, sx)| px * sx / n).collect();
    let total: f64 = next.iter().sum();
    for v in &mut next {
        *v /= total;
    }
    let residual = next
        .iter()
        .zip(p.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    p.copy_from_slice(&next);
    Some(residual)
}

const CHECKPOINT: usize = 500;
const PRUNE_BELOW: f64 = 1e-2;

/// Iterates from `p` until converged or out of budget.
fn iterate(
    profile: &ApprovalProfile,
    p: &mut [f64],
    cfg: &NashSolverConfig,
    budget: usize,
) -> (usize, f64, bool) {
    let mut residual = f64::INFINITY;
    for it in 1..=budget {
        match step(profile, p) {
            Some(r) => residual = r,
            None => return (it, f64::INFINITY, false),
        }
        if residual < cfg.tolerance {
            match verify_slice(profile, p, acceptance_tol(profile, cfg)) {
                Check::Ok => return (it, residual, true),
                // proportional response never revives a zero share
                Check::Stuck => return (it, residual, false),
                Check::Fails => {}
            }
        }
    }
    (budget, residual, false)
}

/// Scores are sums of `1/u_i`, so a converged iterate still carries relative
/// error in them; the slack grows with `n`.
fn acceptance_tol(profile: &ApprovalProfile, cfg: &NashSolverConfig) -> f64 {
    (10.0 * cfg.tolerance).max(1e-8 * profile.n() as f64)
}

enum Check {
    Ok,
    Fails,
    Stuck,
}

fn verify_slice(profile: &ApprovalProfile, p: &[f64], tol: f64) -> Check {
    let Ok(d) = FloatDistribution::new(p.to_vec()) else {
        return Check::Fails;
    };
    let report = verify_nash(profile, &d, tol);
    if report.ok {
        Check::Ok
    } else if report
        .violations
        .iter()
        .any(|v| v.kind == NashViolationKind::ScoreAboveN && v.share == 0.0)
    {
        Check::Stuck
    } else {
        Check::Fails
    }
}

/// Maximizes Nash welfare by proportional response.
///
/// Candidates whose optimal share is zero while their score sits exactly at
/// `n` make plain iteration converge sublinearly. At every checkpoint the
/// solver therefore also tries the restricted problem without the candidates
/// that are small and shrinking, and accepts that solution only if it
/// satisfies the optimality conditions of the full problem.
pub fn run_nash(profile: &ApprovalProfile, config: &NashSolverConfig) -> Result<NashOutcome> {
    if !(config.tolerance > 0.0) || config.max_iterations == 0 {
        return Err(Error::Precondition(
            "nash tolerance must be positive and max iterations at least 1".into(),
        ));
    }
    let mut p: Vec<f64> = match &config.initialization {
        Some(init) if init.m() == profile.m() => init.shares().to_vec(),
        Some(_) => {
            return Err(Error::Precondition(
                "nash initialization has the wrong number of candidates".into(),
            ))
        }
        None => run_sequential(profile, &willingness_ues())?.0.to_f64().into_shares(),
    };
    let n = profile.n() as f64;
    let mut done = 0;
    let mut last_tried: Vec<CandidateId> = Vec::new();
    let mut residual = f64::INFINITY;
    while done < config.max_iterations {
        let chunk = CHECKPOINT.min(config.max_iterations - done);
        let (used, r, converged) = iterate(profile, &mut p, config, chunk);
        done += used;
        residual = r;
        if converged {
            return finish(profile, p, done, residual, Vec::new());
        }
        if !residual.is_finite() {
            break;
        }
        let u = utilities(profile, &p);
        let s = scores(profile, &u);
        let shrinking: Vec<CandidateId> = (0..p.len())
            .filter(|&x| p[x] > 0.0 && p[x] < PRUNE_BELOW && s[x] < n)
            .collect();
        if shrinking.is_empty() || shrinking == last_tried {
            continue;
        }
        last_tried = shrinking.clone();
        let mut trial = p.clone();
        for &x in &shrinking {
            trial[x] = 0.0;
        }
        let total: f64 = trial.iter().sum();
        trial.iter_mut().for_each(|v| *v /= total);
        let budget = config.max_iterations - done;
        let (used, r, converged) = iterate(profile, &mut trial, config, budget);
        if converged {
            return finish(profile, trial, done + used, r, shrinking);
        }
    }
    Err(Error::NotConverged {
        iterations: done,
        residual,
        last: p,
    })
}

fn finish(
    profile: &ApprovalProfile,
    p: Vec<f64>,
    iterations: usize,
    residual: f64,
    pruned: Vec<CandidateId>,
) -> Result<NashOutcome> {
    let distribution = FloatDistribution::new(p)?;
    debug_assert!(verify_nash(profile, &distribution, 1e-6).ok);
    Ok(NashOutcome {
        distribution,
        iterations,
        residual,
        pruned,
    })
}
