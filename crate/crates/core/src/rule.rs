//! Uniform front end over every distribution rule.

use std::fmt;

use crate::classic::{run_cut, run_fut, run_nash, FutEvent, NashOutcome, NashSolverConfig};
use crate::error::{Error, Result};
use crate::model::{AnyDistribution, ApprovalProfile, Decomposition};
use crate::seqpay::{decomposition_from_trace, run_sequential, PaymentWillingness, RuleTrace};

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Sequential(PaymentWillingness),
    Cut,
    Fut,
    Nash(NashSolverConfig),
}

/// Everything a rule run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutput {
    pub distribution: AnyDistribution,
    pub decomposition: Option<Decomposition>,
    pub trace: Option<RuleTrace>,
    pub fut_events: Option<Vec<FutEvent>>,
    pub nash: Option<NashOutcome>,
}

impl Rule {
    /// Parses `map`, `ues`, `add13`, `mps:γ`, `cut`, `fut` or `nash`.
    ///
    /// Custom willingness tables live in files; build those with
    /// [`PaymentWillingness::from_json`] and [`Rule::Sequential`].
    pub fn parse(spec: &str) -> Result<Rule> {
        match spec.trim() {
            "cut" => Ok(Rule::Cut),
            "fut" => Ok(Rule::Fut),
            "nash" => Ok(Rule::Nash(NashSolverConfig::default())),
            s => PaymentWillingness::builtin(s)
                .map(Rule::Sequential)
                .map_err(|_| Error::RuleSpec(s.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Rule::Sequential(pi) => pi.name().to_string(),
            Rule::Cut => "cut".into(),
            Rule::Fut => "fut".into(),
            Rule::Nash(_) => "nash".into(),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Rule::Nash(_))
    }

    pub fn willingness(&self) -> Option<&PaymentWillingness> {
        match self {
            Rule::Sequential(pi) => Some(pi),
            _ => None,
        }
    }

    pub fn run(&self, profile: &ApprovalProfile) -> Result<RuleOutput> {
        let mut out = RuleOutput {
            distribution: AnyDistribution::Exact(crate::model::ExactDistribution::point(profile.m(), 0)),
            decomposition: None,
            trace: None,
            fut_events: None,
            nash: None,
        };
        match self {
            Rule::Sequential(pi) => {
                let (d, trace) = run_sequential(profile, pi)?;
                out.decomposition = Some(decomposition_from_trace(&trace, profile)?);
                out.distribution = AnyDistribution::Exact(d);
                out.trace = Some(trace);
            }
            Rule::Cut => {
                let (d, dec) = run_cut(profile);
                out.distribution = AnyDistribution::Exact(d);
                out.decomposition = Some(dec);
            }
            Rule::Fut => {
                let (d, dec, events) = run_fut(profile);
                out.distribution = AnyDistribution::Exact(d);
                out.decomposition = Some(dec);
                out.fut_events = Some(events);
            }
            Rule::Nash(cfg) => {
                let nash = run_nash(profile, cfg)?;
                out.distribution = AnyDistribution::Float(nash.distribution.clone());
                out.nash = Some(nash);
            }
        }
        Ok(out)
    }

    /// Just the distribution.
    pub fn apply(&self, profile: &ApprovalProfile) -> Result<AnyDistribution> {
        Ok(self.run(profile)?.distribution)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::q;

    #[test]
    fn parse_specs() {
        for s in ["map", "ues", "add13", "mps:1/3", "cut", "fut", "nash"] {
            assert_eq!(Rule::parse(s).unwrap().name(), s);
        }
        assert!(matches!(Rule::parse("borda"), Err(Error::RuleSpec(_))));
    }

    #[test]
    fn single_voter_every_rule() {
        let p = ApprovalProfile::from_names(&["a"], &[(1, &["a"])]).unwrap();
        for s in ["map", "ues", "add13", "mps:1/2", "cut", "fut", "nash"] {
            let d = Rule::parse(s).unwrap().apply(&p).unwrap();
            assert_eq!(d.to_f64().shares(), &[1.0], "{s}");
        }
        let d = Rule::parse("ues").unwrap().apply(&p).unwrap();
        assert_eq!(d.as_exact().unwrap().shares(), &[q(1, 1)]);
    }
}
