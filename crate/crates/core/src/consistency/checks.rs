use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::fairness::{afs_factor, core_exact, core_lower_single, pf_score, Factor};
use crate::model::{
    parse_q, ranking_prefix_equal, render_q, AnyDistribution, ApprovalProfile, CandidateId,
    Distribution, Scalar, Q,
};
use crate::oracle::CORE_LIMIT;
use crate::rule::Rule;

use super::verdict::{AxiomVerdict, CheckInput, Status, Witness};

#[derive(Debug, Clone, PartialEq)]
pub enum Axiom {
    Monotonicity,
    Wpc,
    Spc,
    Rpc,
    Unanimity,
    AfsBound(Q),
    CoreBound(Q),
}

impl Axiom {
    /// Parses `monotonicity`, `wpc`, `spc`, `rpc`, `unanimity`,
    /// `afs_bound:α` or `core_bound:α` (parentheses also accepted).
    pub fn parse(spec: &str) -> Result<Axiom> {
        let s = spec.trim();
        let bad = || Error::Precondition(format!("unknown axiom `{s}`"));
        let bound = |rest: &str| -> Result<Q> {
            let inner = rest
                .strip_prefix(':')
                .or_else(|| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
                .ok_or_else(bad)?;
            parse_q(inner).map_err(|_| bad())
        };
        match s {
            "monotonicity" => Ok(Axiom::Monotonicity),
            "wpc" => Ok(Axiom::Wpc),
            "spc" => Ok(Axiom::Spc),
            "rpc" => Ok(Axiom::Rpc),
            "unanimity" => Ok(Axiom::Unanimity),
            _ => {
                if let Some(rest) = s.strip_prefix("afs_bound") {
                    Ok(Axiom::AfsBound(bound(rest)?))
                } else if let Some(rest) = s.strip_prefix("core_bound") {
                    Ok(Axiom::CoreBound(bound(rest)?))
                } else {
                    Err(bad())
                }
            }
        }
    }

    pub fn needs_pair(&self) -> bool {
        matches!(self, Axiom::Wpc | Axiom::Spc | Axiom::Rpc)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Monotonicity => f.write_str("monotonicity"),
            Axiom::Wpc => f.write_str("wpc"),
            Axiom::Spc => f.write_str("spc"),
            Axiom::Rpc => f.write_str("rpc"),
            Axiom::Unanimity => f.write_str("unanimity"),
            Axiom::AfsBound(a) => write!(f, "afs_bound:{}", render_q(a)),
            Axiom::CoreBound(a) => write!(f, "core_bound:{}", render_q(a)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    /// Comparison slack for float outputs.
    pub tol: f64,
    /// Electorates up to this size get an exact core computation.
    pub core_limit: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol: 1e-6,
            core_limit: CORE_LIMIT,
        }
    }
}

enum Outs {
    Exact(Vec<Distribution<Q>>),
    Float(Vec<Distribution<f64>>),
}

fn run_all(rule: &Rule, profiles: &[&ApprovalProfile]) -> Result<Outs> {
    let outs = profiles
        .iter()
        .map(|p| rule.apply(p))
        .collect::<Result<Vec<_>>>()?;
    if outs.iter().all(AnyDistribution::is_exact) {
        Ok(Outs::Exact(
            outs.into_iter()
                .map(|d| d.as_exact().cloned().expect("exact"))
                .collect(),
        ))
    } else {
        Ok(Outs::Float(outs.iter().map(AnyDistribution::to_f64).collect()))
    }
}

/// Outcome of a generic check: status, witness, notes.
type Partial = (Status, Option<Witness>, Vec<String>);

fn verdict(axiom: &Axiom, rule: &Rule, input: CheckInput, (status, witness, notes): Partial) -> AxiomVerdict {
    AxiomVerdict {
        axiom: axiom.to_string(),
        rule: rule.name(),
        status,
        input,
        witness,
        notes,
    }
}

/// `lo ≤ v ≤ hi`, with a doubtful band of width `tol` outside on floats.
fn within<T: Scalar>(v: &T, lo: &T, hi: &T, tol: f64) -> Status {
    if v >= lo && v <= hi {
        Status::Holds
    } else if !T::EXACT && v.to_f64() >= lo.to_f64() - tol && v.to_f64() <= hi.to_f64() + tol {
        Status::Inconclusive
    } else {
        Status::Fails
    }
}

fn dist_equal<T: Scalar>(p: &Distribution<T>, q: &Distribution<T>, tol: f64) -> bool {
    p.shares()
        .iter()
        .zip(q.shares())
        .all(|(a, b)| a.cmp_tol(b, tol) == Ordering::Equal)
}

fn value(label: &str, v: &impl Scalar) -> (String, String) {
    (label.to_string(), v.render())
}

fn min_max<T: Scalar>(a: &T, b: &T) -> (T, T) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

fn sandwich_at<T: Scalar>(ds: &[Distribution<T>], x: CandidateId, tol: f64) -> (Status, Witness) {
    let (fa, fb, fab) = (ds[0].share(x), ds[1].share(x), ds[2].share(x));
    let (lo, hi) = min_max(fa, fb);
    let status = within(fab, &lo, &hi, tol);
    let witness = Witness {
        candidate: Some(x),
        values: vec![value("f(A)", fa), value("f(A')", fb), value("f(A+A')", fab)],
        bound: Some(format!("{} <= f(A+A') <= {}", lo.render(), hi.render())),
    };
    (status, witness)
}

fn monotonicity_inner<T: Scalar>(ds: &[Distribution<T>], x: CandidateId, tol: f64) -> Partial {
    let (before, after) = (ds[0].share(x), ds[1].share(x));
    let status = if after >= before {
        Status::Holds
    } else if !T::EXACT && after.to_f64() >= before.to_f64() - tol {
        Status::Inconclusive
    } else {
        Status::Fails
    };
    let witness = Witness {
        candidate: Some(x),
        values: vec![value("f(A)", before), value("f(A')", after)],
        bound: Some("f(A') >= f(A)".into()),
    };
    (status, Some(witness), Vec::new())
}

fn wpc_inner<T: Scalar>(ds: &[Distribution<T>], tol: f64) -> Partial {
    if !dist_equal(&ds[0], &ds[1], tol) {
        return (Status::Holds, None, vec!["vacuous: f(A) differs from f(A')".into()]);
    }
    match (0..ds[0].m()).find(|&x| ds[2].share(x).cmp_tol(ds[0].share(x), tol) != Ordering::Equal) {
        None => (Status::Holds, None, Vec::new()),
        Some(x) => {
            let witness = Witness {
                candidate: Some(x),
                values: vec![
                    value("f(A)", ds[0].share(x)),
                    value("f(A')", ds[1].share(x)),
                    value("f(A+A')", ds[2].share(x)),
                ],
                bound: Some("f(A+A') = f(A) = f(A')".into()),
            };
            (Status::Fails, Some(witness), Vec::new())
        }
    }
}

fn spc_inner<T: Scalar>(ds: &[Distribution<T>], tol: f64, rank_filter: bool) -> Partial {
    let mut status = Status::Holds;
    let mut doubtful: Option<Witness> = None;
    let mut notes = Vec::new();
    for x in 0..ds[0].m() {
        if rank_filter {
            let loose = ranking_prefix_equal(&ds[0], &ds[1], x, tol);
            let strict = T::EXACT || loose == ranking_prefix_equal(&ds[0], &ds[1], x, tol * 10.0);
            if !strict {
                notes.push(format!("candidate {x} skipped: ranking prefix equality is tolerance-sensitive"));
                continue;
            }
            if !loose {
                continue;
            }
        }
        let (s, w) = sandwich_at(ds, x, tol);
        match s {
            Status::Fails => return (Status::Fails, Some(w), notes),
            Status::Inconclusive => {
                status = status.and(s);
                doubtful.get_or_insert(w);
            }
            Status::Holds => {}
        }
    }
    (status, doubtful, notes)
}

fn unanimity_inner<T: Scalar>(d: &Distribution<T>, x: CandidateId, tol: f64) -> Partial {
    let share = d.share(x);
    let ok = share.cmp_tol(&T::one(), tol) == Ordering::Equal;
    let witness = Witness {
        candidate: Some(x),
        values: vec![value("f(A)", share)],
        bound: Some("f(A) = 1".into()),
    };
    (if ok { Status::Holds } else { Status::Fails }, Some(witness), Vec::new())
}

fn afs_inner<T: Scalar>(p: &ApprovalProfile, d: &Distribution<T>, alpha: &Q, tol: f64) -> Result<Partial> {
    let res = afs_factor(p, d)?;
    let a = T::from_q(alpha);
    let status = bound_status(&res.factor, &a, tol);
    let witness = Witness {
        candidate: Some(res.witness.candidate),
        values: vec![
            ("afs_factor".into(), res.factor.render()),
            ("coalition size".into(), res.witness.voters.size().to_string()),
        ],
        bound: Some(format!("afs_factor <= {}", render_q(alpha))),
    };
    Ok((status, Some(witness), Vec::new()))
}

fn bound_status<T: Scalar>(f: &Factor<T>, alpha: &T, tol: f64) -> Status {
    if !f.exceeds(alpha, 0.0) {
        Status::Holds
    } else if !T::EXACT && !f.exceeds(alpha, tol) {
        Status::Inconclusive
    } else {
        Status::Fails
    }
}

fn core_inner<T: Scalar>(
    p: &ApprovalProfile,
    d: &Distribution<T>,
    alpha: &Q,
    opts: &CheckOptions,
) -> Result<Partial> {
    let a = T::from_q(alpha);
    let bound = Some(format!("core factor <= {}", render_q(alpha)));
    if p.n() <= opts.core_limit as u64 {
        let res = core_exact(p, d, opts.core_limit)?;
        let status = bound_status(&res.factor, &a, opts.tol);
        let mut notes = Vec::new();
        if res.factor.cmp_tol(&Factor::Finite(a.clone()), 0.0) == Ordering::Equal {
            notes.push("boundary: best deviation matches the bound exactly".into());
        }
        let witness = Witness {
            candidate: None,
            values: vec![
                ("core_exact".into(), res.factor.render()),
                ("coalition size".into(), res.witness.voters.size().to_string()),
            ],
            bound,
        };
        return Ok((status, Some(witness), notes));
    }
    let upper = pf_score(p, d)?;
    let lower = core_lower_single(p, d)?;
    let values = vec![
        ("pf_score".into(), upper.factor.render()),
        ("core_lower".into(), lower.factor.render()),
    ];
    let status = if bound_status(&upper.factor, &a, opts.tol) == Status::Holds {
        Status::Holds
    } else if bound_status(&lower.factor, &a, opts.tol) == Status::Fails {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    let notes = vec![format!("n = {} above exact limit {}; used PF and point-mass bounds", p.n(), opts.core_limit)];
    Ok((status, Some(Witness { candidate: None, values, bound }), notes))
}

macro_rules! dispatch {
    ($outs:expr, $ds:ident => $body:expr) => {
        match $outs {
            Outs::Exact($ds) => $body,
            Outs::Float($ds) => $body,
        }
    };
}

/// Adds `x` to the ballot of one voter from group `group` and compares `x`'s share.
pub fn check_monotonicity_step(
    rule: &Rule,
    profile: &ApprovalProfile,
    group: usize,
    x: CandidateId,
    opts: &CheckOptions,
) -> Result<AxiomVerdict> {
    let after = profile.with_added_approval(group, x)?;
    let outs = run_all(rule, &[profile, &after])?;
    let partial = dispatch!(outs, ds => monotonicity_inner(&ds, x, opts.tol));
    let input = CheckInput::Step {
        profile: profile.clone(),
        group,
        candidate: x,
    };
    Ok(verdict(&Axiom::Monotonicity, rule, input, partial))
}

fn pair_outputs(rule: &Rule, a: &ApprovalProfile, b: &ApprovalProfile) -> Result<Outs> {
    let ab = a.combine(b)?;
    run_all(rule, &[a, b, &ab])
}

pub fn check_wpc_pair(rule: &Rule, a: &ApprovalProfile, b: &ApprovalProfile, opts: &CheckOptions) -> Result<AxiomVerdict> {
    let outs = pair_outputs(rule, a, b)?;
    let partial = dispatch!(outs, ds => wpc_inner(&ds, opts.tol));
    Ok(verdict(&Axiom::Wpc, rule, CheckInput::Pair(a.clone(), b.clone()), partial))
}

pub fn check_spc_pair(rule: &Rule, a: &ApprovalProfile, b: &ApprovalProfile, opts: &CheckOptions) -> Result<AxiomVerdict> {
    let outs = pair_outputs(rule, a, b)?;
    let partial = dispatch!(outs, ds => spc_inner(&ds, opts.tol, false));
    Ok(verdict(&Axiom::Spc, rule, CheckInput::Pair(a.clone(), b.clone()), partial))
}

/// SPC's sandwich, required only at candidates where the rankings of `f(A)`
/// and `f(A')` agree down to that candidate.
pub fn check_rpc_pair(rule: &Rule, a: &ApprovalProfile, b: &ApprovalProfile, opts: &CheckOptions) -> Result<AxiomVerdict> {
    let outs = pair_outputs(rule, a, b)?;
    let partial = dispatch!(outs, ds => spc_inner(&ds, opts.tol, true));
    Ok(verdict(&Axiom::Rpc, rule, CheckInput::Pair(a.clone(), b.clone()), partial))
}

pub fn check_unanimity(rule: &Rule, profile: &ApprovalProfile, opts: &CheckOptions) -> Result<AxiomVerdict> {
    let input = CheckInput::Single(profile.clone());
    let Some(x) = profile.unique_common_candidate() else {
        let partial = (Status::Holds, None, vec!["vacuous: no unique common candidate".into()]);
        return Ok(verdict(&Axiom::Unanimity, rule, input, partial));
    };
    let outs = run_all(rule, &[profile])?;
    let partial = dispatch!(outs, ds => unanimity_inner(&ds[0], x, opts.tol));
    Ok(verdict(&Axiom::Unanimity, rule, input, partial))
}

pub fn check_afs_bound(rule: &Rule, profile: &ApprovalProfile, alpha: &Q, opts: &CheckOptions) -> Result<AxiomVerdict> {
    let outs = run_all(rule, &[profile])?;
    let partial = dispatch!(outs, ds => afs_inner(profile, &ds[0], alpha, opts.tol)?);
    Ok(verdict(&Axiom::AfsBound(alpha.clone()), rule, CheckInput::Single(profile.clone()), partial))
}

/// Exact core factor when `n` is within the limit; otherwise PF certifies a
/// pass, the point-mass bound certifies a failure, and the gap is inconclusive.
pub fn check_core_bound(rule: &Rule, profile: &ApprovalProfile, alpha: &Q, opts: &CheckOptions) -> Result<AxiomVerdict> {
    let outs = run_all(rule, &[profile])?;
    let partial = dispatch!(outs, ds => core_inner(profile, &ds[0], alpha, opts)?);
    Ok(verdict(&Axiom::CoreBound(alpha.clone()), rule, CheckInput::Single(profile.clone()), partial))
}

/// Runs the check for `axiom` on `input`.
pub fn check(axiom: &Axiom, rule: &Rule, input: &CheckInput, opts: &CheckOptions) -> Result<AxiomVerdict> {
    let shape = || Error::Precondition(format!("axiom {axiom} does not apply to these inputs"));
    match (axiom, input) {
        (Axiom::Monotonicity, CheckInput::Step { profile, group, candidate }) => {
            check_monotonicity_step(rule, profile, *group, *candidate, opts)
        }
        (Axiom::Wpc, CheckInput::Pair(a, b)) => check_wpc_pair(rule, a, b, opts),
        (Axiom::Spc, CheckInput::Pair(a, b)) => check_spc_pair(rule, a, b, opts),
        (Axiom::Rpc, CheckInput::Pair(a, b)) => check_rpc_pair(rule, a, b, opts),
        (Axiom::Unanimity, CheckInput::Single(p)) => check_unanimity(rule, p, opts),
        (Axiom::AfsBound(a), CheckInput::Single(p)) => check_afs_bound(rule, p, a, opts),
        (Axiom::CoreBound(a), CheckInput::Single(p)) => check_core_bound(rule, p, a, opts),
        _ => Err(shape()),
    }
}

impl AxiomVerdict {
    /// Re-runs the check from the recorded inputs and confirms the status.
    pub fn recheck(&self, rule: &Rule, opts: &CheckOptions) -> Result<bool> {
        let axiom = Axiom::parse(&self.axiom)?;
        Ok(check(&axiom, rule, &self.input, opts)?.status == self.status)
    }
}
