use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{AnyDistribution, ApprovalProfile, Distribution, Scalar, Q};
use crate::oracle::CORE_LIMIT;

use super::bounds::{afs_factor, core_exact, core_lower_single, pf_score};
use super::decompose::{decompose, DecomposeResult};
use super::factor::{AfsResult, CoreResult, Factor, PfResult, VoterSet};

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOptions {
    pub exact_core: bool,
    pub core_limit: usize,
    /// Comparison slack for float distributions.
    pub tol: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            exact_core: false,
            core_limit: CORE_LIMIT,
            tol: 1e-6,
        }
    }
}

/// The two inequalities linking AFS and core factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainVerdict {
    /// `core ≤ afs·(1 + ln n)`.
    pub core_within_log_afs: bool,
    /// `afs ≤ 2·core`.
    pub afs_within_twice_core: bool,
}

impl ChainVerdict {
    pub fn holds(&self) -> bool {
        self.core_within_log_afs && self.afs_within_twice_core
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessAudit<T> {
    pub n: u64,
    pub afs: AfsResult<T>,
    pub pf: PfResult<T>,
    pub core_lower: CoreResult<T>,
    pub core_exact: Option<CoreResult<T>>,
    /// Why the exact core was not computed, when requested.
    pub core_exact_skipped: Option<String>,
    pub decomposition: DecomposeResult,
    pub chain: Option<ChainVerdict>,
}

/// Checks the AFS/core chain on computed factors.
pub fn chain_verdict<T: Scalar>(n: u64, afs: &Factor<T>, core: &Factor<T>, tol: f64) -> ChainVerdict {
    let log_factor = 1.0 + (n as f64).ln();
    let (a, c) = (afs.to_f64(), core.to_f64());
    ChainVerdict {
        core_within_log_afs: afs.is_unbounded() || c <= a * log_factor + tol,
        afs_within_twice_core: core.is_unbounded() || a <= 2.0 * c + tol,
    }
}

pub fn audit<T: Scalar>(
    profile: &ApprovalProfile,
    p: &Distribution<T>,
    opts: &AuditOptions,
) -> Result<FairnessAudit<T>> {
    if p.m() != profile.m() {
        return Err(Error::model("distribution and profile disagree on the candidates"));
    }
    let afs = afs_factor(profile, p)?;
    let pf = pf_score(profile, p)?;
    let core_lower = core_lower_single(profile, p)?;
    let (core_exact, core_exact_skipped) = if opts.exact_core {
        match core_exact(profile, p, opts.core_limit) {
            Ok(c) => (Some(c), None),
            Err(e @ Error::TooLarge { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };
    let chain = core_exact
        .as_ref()
        .map(|c| chain_verdict(profile.n(), &afs.factor, &c.factor, opts.tol));
    Ok(FairnessAudit {
        n: profile.n(),
        afs,
        pf,
        core_lower,
        core_exact,
        core_exact_skipped,
        decomposition: decompose(profile, p),
        chain,
    })
}

fn voters_json(profile: &ApprovalProfile, voters: &VoterSet) -> Value {
    json!({
        "size": voters.size(),
        "groups": voters.to_json(),
        "ballots": voters.members.iter()
            .map(|(g, _)| profile.ballot_names(&profile.groups()[*g].ballot).join(" "))
            .collect::<Vec<_>>(),
    })
}

fn dist_json<T: Scalar>(profile: &ApprovalProfile, q: &[T]) -> Value {
    Value::Object(
        q.iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(x, v)| (profile.name(x).to_string(), v.to_json()))
            .collect(),
    )
}

fn core_json<T: Scalar>(profile: &ApprovalProfile, c: &CoreResult<T>) -> Value {
    json!({
        "factor": c.factor.to_json(),
        "coalition": voters_json(profile, &c.witness.voters),
        "deviation": dist_json(profile, &c.witness.deviation),
    })
}

impl<T: Scalar> FairnessAudit<T> {
    pub fn to_json(&self, profile: &ApprovalProfile) -> Value {
        let decomposition = match &self.decomposition {
            DecomposeResult::Feasible(d) => json!({
                "decomposable": true,
                "parts": d.parts().iter().map(|p| dist_json(profile, p.shares())).collect::<Vec<_>>(),
            }),
            DecomposeResult::Infeasible {
                candidates,
                mass,
                supporters,
            } => json!({
                "decomposable": false,
                "cut": candidates.iter().map(|&x| profile.name(x)).collect::<Vec<_>>(),
                "mass": mass.render(),
                "supporters": supporters,
            }),
        };
        json!({
            "n": self.n,
            "afs": {
                "factor": self.afs.factor.to_json(),
                "candidate": profile.name(self.afs.witness.candidate),
                "coalition": voters_json(profile, &self.afs.witness.voters),
                "utility_sum": self.afs.witness.utility_sum.to_json(),
            },
            "pf": {
                "factor": self.pf.factor.to_json(),
                "candidate": profile.name(self.pf.candidate),
            },
            "core_lower": core_json(profile, &self.core_lower),
            "core_exact": self.core_exact.as_ref().map(|c| core_json(profile, c)),
            "core_exact_skipped": self.core_exact_skipped,
            "decomposition": decomposition,
            "chain": self.chain.as_ref().map(|c| json!({
                "core_within_log_afs": c.core_within_log_afs,
                "afs_within_twice_core": c.afs_within_twice_core,
            })),
        })
    }

    pub fn render_text(&self, profile: &ApprovalProfile) -> String {
        let mut out = String::new();
        let afs = &self.afs.witness;
        out.push_str(&format!(
            "afs_factor   {}  (candidate {}, {} voters)\n",
            self.afs.factor.render(),
            profile.name(afs.candidate),
            afs.voters.size()
        ));
        out.push_str(&format!(
            "pf_score     {}  (candidate {})\n",
            self.pf.factor.render(),
            profile.name(self.pf.candidate)
        ));
        out.push_str(&format!(
            "core_lower   {}  ({} voters)\n",
            self.core_lower.factor.render(),
            self.core_lower.witness.voters.size()
        ));
        if let Some(c) = &self.core_exact {
            out.push_str(&format!(
                "core_exact   {}  ({} voters)\n",
                c.factor.render(),
                c.witness.voters.size()
            ));
        }
        if let Some(reason) = &self.core_exact_skipped {
            out.push_str(&format!("core_exact   skipped: {reason}\n"));
        }
        match &self.decomposition {
            DecomposeResult::Feasible(_) => out.push_str("decomposable yes\n"),
            DecomposeResult::Infeasible { candidates, mass, supporters } => out.push_str(&format!(
                "decomposable no  (cut {{{}}} holds {} but {} supporters own {}/{})\n",
                candidates.iter().map(|&x| profile.name(x)).collect::<Vec<_>>().join(","),
                mass.render(),
                supporters,
                supporters,
                self.n
            )),
        }
        if let Some(c) = &self.chain {
            out.push_str(&format!(
                "chain        core<=afs(1+ln n): {}  afs<=2core: {}\n",
                c.core_within_log_afs, c.afs_within_twice_core
            ));
        }
        out
    }
}

/// An audit on whichever backend the distribution uses.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAudit {
    Exact(FairnessAudit<Q>),
    Float(FairnessAudit<f64>),
}

impl AnyAudit {
    pub fn to_json(&self, profile: &ApprovalProfile) -> Value {
        match self {
            AnyAudit::Exact(a) => a.to_json(profile),
            AnyAudit::Float(a) => a.to_json(profile),
        }
    }

    pub fn render_text(&self, profile: &ApprovalProfile) -> String {
        match self {
            AnyAudit::Exact(a) => a.render_text(profile),
            AnyAudit::Float(a) => a.render_text(profile),
        }
    }

    pub fn decomposable(&self) -> bool {
        match self {
            AnyAudit::Exact(a) => a.decomposition.is_feasible(),
            AnyAudit::Float(a) => a.decomposition.is_feasible(),
        }
    }
}

pub fn audit_any(
    profile: &ApprovalProfile,
    p: &AnyDistribution,
    opts: &AuditOptions,
) -> Result<AnyAudit> {
    Ok(match p {
        AnyDistribution::Exact(d) => AnyAudit::Exact(audit(profile, d, opts)?),
        AnyDistribution::Float(d) => AnyAudit::Float(audit(profile, d, opts)?),
    })
}
