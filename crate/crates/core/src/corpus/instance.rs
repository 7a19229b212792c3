use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::consistency::{check, check_monotonicity_step, Axiom, CheckInput, CheckOptions, Status};
use crate::error::{Error, Result};
use crate::fairness::{afs_factor, core_exact, core_lower_single, deviation_ratio, Factor, VoterSet};
use crate::model::{render_q, ApprovalBallot, ApprovalProfile, ExactDistribution, Q};
use crate::oracle::CORE_LIMIT;
use crate::rule::Rule;
use crate::seqpay::PaymentWillingness;

/// One claim about a named profile, re-derivable by running a rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    /// Exact shares of the listed candidates.
    Shares {
        rule: String,
        profile: String,
        shares: Vec<(String, Q)>,
    },
    ApproxShares {
        rule: String,
        profile: String,
        shares: Vec<(String, f64)>,
        tol: f64,
    },
    AfsAtLeast {
        rule: String,
        profile: String,
        bound: Q,
    },
    AfsEquals {
        rule: String,
        profile: String,
        value: Q,
    },
    CoreAtLeast {
        rule: String,
        profile: String,
        bound: Q,
    },
    /// Every voter gains at least `bound` times their utility by moving
    /// their shares to the uniform distribution over `toward`.
    DeviationAtLeast {
        rule: String,
        profile: String,
        toward: Vec<String>,
        bound: Q,
    },
    /// The first funded candidates, in order.
    Order {
        rule: String,
        profile: String,
        prefix: Vec<String>,
    },
    /// Summed utility of one voter per listed ballot.
    Utility {
        rule: String,
        profile: String,
        ballots: Vec<Vec<String>>,
        value: Q,
    },
    ShareDecreases {
        rule: String,
        from: String,
        to: String,
        candidate: String,
    },
    PairViolation {
        axiom: Axiom,
        rule: String,
        a: String,
        b: String,
        candidate: Option<String>,
    },
    /// At least one of the pairs violates the axiom.
    AnyPairViolation {
        axiom: Axiom,
        rule: String,
        pairs: Vec<(String, String)>,
    },
    StepViolation {
        rule: String,
        profile: String,
        group: usize,
        candidate: String,
    },
}

/// Outcome of re-deriving one expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationCheck {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedInstance {
    pub id: String,
    pub description: String,
    pub params: BTreeMap<String, String>,
    pub profiles: Vec<(String, ApprovalProfile)>,
    pub expected: Vec<Expectation>,
    /// Resolves rule names that are not built in.
    pub willingness: Option<PaymentWillingness>,
}

fn names(v: &[String]) -> String {
    v.join(" ")
}

fn at_least(f: &Factor<Q>, bound: &Q) -> bool {
    match f {
        Factor::Unbounded => true,
        Factor::Finite(v) => v >= bound,
    }
}

impl Expectation {
    pub fn kind(&self) -> &'static str {
        match self {
            Expectation::Shares { .. } => "shares",
            Expectation::ApproxShares { .. } => "approx_shares",
            Expectation::AfsAtLeast { .. } => "afs_at_least",
            Expectation::AfsEquals { .. } => "afs_equals",
            Expectation::CoreAtLeast { .. } => "core_at_least",
            Expectation::DeviationAtLeast { .. } => "deviation_at_least",
            Expectation::Order { .. } => "order",
            Expectation::Utility { .. } => "utility",
            Expectation::ShareDecreases { .. } => "share_decreases",
            Expectation::PairViolation { .. } => "pair_violation",
            Expectation::AnyPairViolation { .. } => "any_pair_violation",
            Expectation::StepViolation { .. } => "step_violation",
        }
    }

    pub fn rule(&self) -> &str {
        match self {
            Expectation::Shares { rule, .. }
            | Expectation::ApproxShares { rule, .. }
            | Expectation::AfsAtLeast { rule, .. }
            | Expectation::AfsEquals { rule, .. }
            | Expectation::CoreAtLeast { rule, .. }
            | Expectation::DeviationAtLeast { rule, .. }
            | Expectation::Order { rule, .. }
            | Expectation::Utility { rule, .. }
            | Expectation::ShareDecreases { rule, .. }
            | Expectation::PairViolation { rule, .. }
            | Expectation::AnyPairViolation { rule, .. }
            | Expectation::StepViolation { rule, .. } => rule,
        }
    }

    pub fn to_json(&self) -> Value {
        let shares_obj = |shares: &[(String, Q)]| {
            Value::Object(shares.iter().map(|(n, v)| (n.clone(), json!(render_q(v)))).collect::<Map<_, _>>())
        };
        let mut v = match self {
            Expectation::Shares { profile, shares, .. } => json!({"profile": profile, "shares": shares_obj(shares)}),
            Expectation::ApproxShares { profile, shares, tol, .. } => json!({
                "profile": profile,
                "shares": shares.iter().map(|(n, v)| (n.clone(), json!(v))).collect::<Map<_, _>>(),
                "tol": tol,
            }),
            Expectation::AfsAtLeast { profile, bound, .. } | Expectation::CoreAtLeast { profile, bound, .. } => {
                json!({"profile": profile, "bound": render_q(bound)})
            }
            Expectation::AfsEquals { profile, value, .. } => json!({"profile": profile, "value": render_q(value)}),
            Expectation::DeviationAtLeast {
                profile, toward, bound, ..
            } => json!({"profile": profile, "coalition": "all", "toward": toward, "bound": render_q(bound)}),
            Expectation::Order { profile, prefix, .. } => json!({"profile": profile, "prefix": prefix}),
            Expectation::Utility {
                profile, ballots, value, ..
            } => json!({"profile": profile, "ballots": ballots, "value": render_q(value)}),
            Expectation::ShareDecreases { from, to, candidate, .. } => {
                json!({"from": from, "to": to, "candidate": candidate})
            }
            Expectation::PairViolation {
                axiom, a, b, candidate, ..
            } => json!({"axiom": axiom.to_string(), "a": a, "b": b, "candidate": candidate}),
            Expectation::AnyPairViolation { axiom, pairs, .. } => json!({
                "axiom": axiom.to_string(),
                "pairs": pairs.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            }),
            Expectation::StepViolation {
                profile, group, candidate, ..
            } => json!({"profile": profile, "group": group, "candidate": candidate}),
        };
        v["kind"] = json!(self.kind());
        v["rule"] = json!(self.rule());
        v
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rule();
        match self {
            Expectation::Shares { profile, shares, .. } => {
                let s: Vec<String> = shares.iter().map(|(n, v)| format!("{n}:{}", render_q(v))).collect();
                write!(f, "{r} on {profile} gives {}", s.join(" "))
            }
            Expectation::ApproxShares { profile, shares, tol, .. } => {
                let s: Vec<String> = shares.iter().map(|(n, v)| format!("{n}:{v}")).collect();
                write!(f, "{r} on {profile} gives {} (±{tol:e})", s.join(" "))
            }
            Expectation::AfsAtLeast { profile, bound, .. } => {
                write!(f, "afs factor of {r} on {profile} ≥ {}", render_q(bound))
            }
            Expectation::AfsEquals { profile, value, .. } => {
                write!(f, "afs factor of {r} on {profile} = {}", render_q(value))
            }
            Expectation::CoreAtLeast { profile, bound, .. } => {
                write!(f, "core factor of {r} on {profile} ≥ {}", render_q(bound))
            }
            Expectation::DeviationAtLeast {
                profile, toward, bound, ..
            } => write!(
                f,
                "all voters of {profile} gain ≥ {} over {r} on uniform {{{}}}",
                render_q(bound),
                names(toward)
            ),
            Expectation::Order { profile, prefix, .. } => write!(f, "{r} on {profile} funds {} first", names(prefix)),
            Expectation::Utility {
                profile, ballots, value, ..
            } => write!(f, "{r} on {profile}: utility of {} ballots = {}", ballots.len(), render_q(value)),
            Expectation::ShareDecreases { from, to, candidate, .. } => {
                write!(f, "{r}: share of {candidate} drops from {from} to {to}")
            }
            Expectation::PairViolation { axiom, a, b, candidate, .. } => match candidate {
                Some(c) => write!(f, "{r} fails {axiom} on ({a}, {b}) at {c}"),
                None => write!(f, "{r} fails {axiom} on ({a}, {b})"),
            },
            Expectation::AnyPairViolation { axiom, pairs, .. } => {
                write!(f, "{r} fails {axiom} on one of {} pairs", pairs.len())
            }
            Expectation::StepViolation {
                profile, group, candidate, ..
            } => write!(f, "{r} fails monotonicity adding {candidate} to group {group} of {profile}"),
        }
    }
}

impl NamedInstance {
    pub fn new(id: &str, description: &str) -> Self {
        NamedInstance {
            id: id.into(),
            description: description.into(),
            params: BTreeMap::new(),
            profiles: Vec::new(),
            expected: Vec::new(),
            willingness: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn with_profile(mut self, name: &str, profile: ApprovalProfile) -> Self {
        self.profiles.push((name.into(), profile));
        self
    }

    pub fn expect(mut self, e: Expectation) -> Self {
        self.expected.push(e);
        self
    }

    pub fn profile(&self, name: &str) -> Result<&ApprovalProfile> {
        self.profiles
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::Precondition(format!("instance {} has no profile `{name}`", self.id)))
    }

    pub fn rule(&self, spec: &str) -> Result<Rule> {
        match &self.willingness {
            Some(pi) if pi.name() == spec => Ok(Rule::Sequential(pi.clone())),
            _ => Rule::parse(spec),
        }
    }

    fn exact(&self, rule: &str, profile: &str) -> Result<(ApprovalProfile, ExactDistribution)> {
        let p = self.profile(profile)?;
        let d = self.rule(rule)?.apply(p)?;
        let d = d
            .as_exact()
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("rule {rule} has no exact output")))?;
        Ok((p.clone(), d))
    }

    fn candidate(&self, p: &ApprovalProfile, name: &str) -> Result<usize> {
        p.candidate_index(name)
            .ok_or_else(|| Error::Precondition(format!("instance {} has no candidate `{name}`", self.id)))
    }

    fn ballot(&self, p: &ApprovalProfile, names: &[String]) -> Result<ApprovalBallot> {
        let ids = names.iter().map(|n| self.candidate(p, n)).collect::<Result<Vec<_>>>()?;
        ApprovalBallot::new(ids)
    }

    fn verify_one(&self, e: &Expectation, opts: &CheckOptions) -> Result<(bool, String)> {
        match e {
            Expectation::Shares { rule, profile, shares } => {
                let (p, d) = self.exact(rule, profile)?;
                let mut ok = true;
                for (name, want) in shares {
                    ok &= d.share(self.candidate(&p, name)?) == want;
                }
                Ok((ok, format!("got {}", d.render().join(" "))))
            }
            Expectation::ApproxShares {
                rule,
                profile,
                shares,
                tol,
            } => {
                let p = self.profile(profile)?;
                let d = self.rule(rule)?.apply(p)?.to_f64();
                let mut ok = true;
                for (name, want) in shares {
                    ok &= (d.share(self.candidate(p, name)?) - want).abs() <= *tol;
                }
                Ok((ok, format!("got {}", d.render().join(" "))))
            }
            Expectation::AfsAtLeast { rule, profile, bound } => {
                let (p, d) = self.exact(rule, profile)?;
                let f = afs_factor(&p, &d)?.factor;
                Ok((at_least(&f, bound), format!("afs factor {}", f.render())))
            }
            Expectation::AfsEquals { rule, profile, value } => {
                let (p, d) = self.exact(rule, profile)?;
                let f = afs_factor(&p, &d)?.factor;
                Ok((f == Factor::Finite(value.clone()), format!("afs factor {}", f.render())))
            }
            Expectation::CoreAtLeast { rule, profile, bound } => {
                let (p, d) = self.exact(rule, profile)?;
                let lower = core_lower_single(&p, &d)?.factor;
                if at_least(&lower, bound) {
                    return Ok((true, format!("point-mass deviation {}", lower.render())));
                }
                if p.n() as usize <= CORE_LIMIT {
                    let f = core_exact(&p, &d, CORE_LIMIT)?.factor;
                    return Ok((at_least(&f, bound), format!("core factor {}", f.render())));
                }
                Ok((false, format!("point-mass deviation {} and n too large", lower.render())))
            }
            Expectation::DeviationAtLeast {
                rule,
                profile,
                toward,
                bound,
            } => {
                let (p, d) = self.exact(rule, profile)?;
                let mut shares = vec![Q::zero(); p.m()];
                for name in toward {
                    shares[self.candidate(&p, name)?] = Q::from_integer((toward.len() as i64).into()).recip();
                }
                let target = ExactDistribution::new(shares)?;
                let everyone = VoterSet {
                    members: p.groups().iter().enumerate().map(|(g, grp)| (g, grp.count)).collect(),
                };
                let f = deviation_ratio(&p, &d, &everyone, &target)?;
                Ok((at_least(&f, bound), format!("worst ratio {}", f.render())))
            }
            Expectation::Order { rule, profile, prefix } => {
                let p = self.profile(profile)?;
                let out = self.rule(rule)?.run(p)?;
                let trace = out
                    .trace
                    .ok_or_else(|| Error::Precondition(format!("rule {rule} has no trace")))?;
                let order: Vec<String> = trace.order().iter().map(|&x| p.name(x).to_string()).collect();
                let ok = order.len() >= prefix.len() && order[..prefix.len()] == prefix[..];
                Ok((ok, format!("order {}", names(&order))))
            }
            Expectation::Utility {
                rule,
                profile,
                ballots,
                value,
            } => {
                let (p, d) = self.exact(rule, profile)?;
                let mut total = Q::zero();
                for b in ballots {
                    total += d.utility(&self.ballot(&p, b)?)?;
                }
                Ok((&total == value, format!("utility {}", render_q(&total))))
            }
            Expectation::ShareDecreases {
                rule,
                from,
                to,
                candidate,
            } => {
                let (p, before) = self.exact(rule, from)?;
                let (_, after) = self.exact(rule, to)?;
                let x = self.candidate(&p, candidate)?;
                Ok((
                    after.share(x) < before.share(x),
                    format!("{} → {}", render_q(before.share(x)), render_q(after.share(x))),
                ))
            }
            Expectation::PairViolation {
                axiom,
                rule,
                a,
                b,
                candidate,
            } => {
                let input = CheckInput::Pair(self.profile(a)?.clone(), self.profile(b)?.clone());
                let v = check(axiom, &self.rule(rule)?, &input, opts)?;
                let at = v.witness.as_ref().and_then(|w| w.candidate);
                let at_name = at.map(|x| self.profile(a).map(|p| p.name(x).to_string())).transpose()?;
                let ok = v.status == Status::Fails && candidate.as_ref().is_none_or(|c| Some(c) == at_name.as_ref());
                Ok((ok, format!("{} at {}", v.status, at_name.unwrap_or_else(|| "-".into()))))
            }
            Expectation::AnyPairViolation { axiom, rule, pairs } => {
                let r = self.rule(rule)?;
                let mut failed = Vec::new();
                for (a, b) in pairs {
                    let input = CheckInput::Pair(self.profile(a)?.clone(), self.profile(b)?.clone());
                    if check(axiom, &r, &input, opts)?.status == Status::Fails {
                        failed.push(format!("({a}, {b})"));
                    }
                }
                Ok((!failed.is_empty(), format!("fails on {}", failed.join(" "))))
            }
            Expectation::StepViolation {
                rule,
                profile,
                group,
                candidate,
            } => {
                let p = self.profile(profile)?;
                let x = self.candidate(p, candidate)?;
                let v = check_monotonicity_step(&self.rule(rule)?, p, *group, x, opts)?;
                Ok((v.status == Status::Fails, v.status.to_string()))
            }
        }
    }

    /// Re-derives every expectation.
    pub fn verify(&self) -> Result<Vec<ExpectationCheck>> {
        let opts = CheckOptions::default();
        self.expected
            .iter()
            .map(|e| {
                let (passed, detail) = self.verify_one(e, &opts)?;
                Ok(ExpectationCheck {
                    label: e.to_string(),
                    passed,
                    detail,
                })
            })
            .collect()
    }

    /// Profile file names: `<id>.profile` for a single profile, else `<id>_<name>.profile`.
    pub fn file_name(&self, profile: &str) -> String {
        if self.profiles.len() == 1 {
            format!("{}.profile", self.id)
        } else {
            format!("{}_{profile}.profile", self.id)
        }
    }

    /// The expected-results sidecar.
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "description": self.description,
            "params": self.params,
            "profiles": self
                .profiles
                .iter()
                .map(|(n, _)| (n.clone(), json!(self.file_name(n))))
                .collect::<Map<_, _>>(),
            "willingness": self.willingness.as_ref().map(|pi| {
                let t = self.profiles.iter().map(|(_, p)| p.max_ballot_size()).max().unwrap_or(1) + 1;
                pi.to_json(t)
            }),
            "expected": self.expected.iter().map(Expectation::to_json).collect::<Vec<_>>(),
        })
    }

    /// Writes every profile in text format plus `<id>.expected.json`.
    pub fn write_files(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, p) in &self.profiles {
            let path = dir.join(self.file_name(name));
            std::fs::write(&path, p.to_string())?;
            written.push(path);
        }
        let path = dir.join(format!("{}.expected.json", self.id));
        let body = serde_json::to_string_pretty(&self.to_json()).expect("sidecar serializes");
        std::fs::write(&path, body + "\n")?;
        written.push(path);
        Ok(written)
    }
}
