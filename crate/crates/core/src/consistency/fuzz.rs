use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Result;
use crate::rule::Rule;

use super::checks::{check, Axiom, CheckOptions};
use super::claims::ClaimsTable;
use super::generate::{random_pair, random_profile, random_step, random_unanimous, GeneratorConfig};
use super::verdict::{AxiomVerdict, CheckInput, Status};

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub generator: GeneratorConfig,
    pub seed: u64,
    pub trials: usize,
    pub check: CheckOptions,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            generator: GeneratorConfig::default(),
            seed: 0,
            trials: 1000,
            check: CheckOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Checked(AxiomVerdict),
    /// The generator found no admissible input (every ballot full).
    Skipped,
    /// The rule rejected the input, e.g. a willingness table too short.
    Error(String),
}

/// The random input for `trial`, drawn from its own stream of `seed`.
pub fn trial_input(axiom: &Axiom, cfg: &GeneratorConfig, seed: u64, trial: u64) -> Option<CheckInput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    match axiom {
        Axiom::Monotonicity => random_step(&mut rng, cfg).map(|(profile, group, candidate)| CheckInput::Step {
            profile,
            group,
            candidate,
        }),
        Axiom::Wpc | Axiom::Spc | Axiom::Rpc => {
            let (a, b) = random_pair(&mut rng, cfg);
            Some(CheckInput::Pair(a, b))
        }
        Axiom::Unanimity => Some(CheckInput::Single(random_unanimous(&mut rng, cfg))),
        Axiom::AfsBound(_) | Axiom::CoreBound(_) => Some(CheckInput::Single(random_profile(&mut rng, cfg))),
    }
}

fn generator_for(rule: &Rule, cfg: &GeneratorConfig) -> GeneratorConfig {
    match rule.willingness().and_then(|pi| pi.max_ballot_size()) {
        Some(t) => cfg.with_ballot_cap(t),
        None => *cfg,
    }
}

/// One outcome per trial, in trial order, independent of thread scheduling.
pub fn fuzz_outcomes(axiom: &Axiom, rule: &Rule, cfg: &FuzzConfig) -> Vec<TrialOutcome> {
    let generator = generator_for(rule, &cfg.generator);
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| match trial_input(axiom, &generator, cfg.seed, trial) {
            None => TrialOutcome::Skipped,
            Some(input) => match check(axiom, rule, &input, &cfg.check) {
                Ok(v) => TrialOutcome::Checked(v),
                Err(e) => TrialOutcome::Error(e.to_string()),
            },
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzFailure {
    pub trial: u64,
    pub verdict: AxiomVerdict,
    /// Re-running the check from the recorded inputs gave the same status.
    pub rechecked: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzReport {
    pub axiom: String,
    pub rule: String,
    pub seed: u64,
    pub trials: usize,
    pub holds: usize,
    pub inconclusive: usize,
    pub skipped: usize,
    pub failures: Vec<FuzzFailure>,
    pub errors: Vec<(u64, String)>,
    /// Whether the claims table says the rule satisfies the axiom.
    pub claimed: bool,
}

impl FuzzReport {
    /// Failures count against the rule only when the axiom is claimed.
    pub fn violates_claim(&self) -> bool {
        self.claimed && !self.failures.is_empty()
    }

    pub fn summary_json(&self) -> Value {
        json!({
            "summary": true,
            "axiom": self.axiom,
            "rule": self.rule,
            "seed": self.seed,
            "trials": self.trials,
            "holds": self.holds,
            "fails": self.failures.len(),
            "inconclusive": self.inconclusive,
            "skipped": self.skipped,
            "errors": self.errors.len(),
            "claimed": self.claimed,
            "rechecked": self.failures.iter().all(|f| f.rechecked),
        })
    }

    /// JSON lines: each failure, each error, then the summary.
    pub fn to_json_lines(&self) -> Vec<Value> {
        let mut lines: Vec<Value> = self
            .failures
            .iter()
            .map(|f| {
                let mut v = f.verdict.to_json();
                v["trial"] = json!(f.trial);
                v["rechecked"] = json!(f.rechecked);
                v
            })
            .collect();
        lines.extend(self.errors.iter().map(|(t, e)| json!({"trial": t, "error": e})));
        lines.push(self.summary_json());
        lines
    }
}

pub fn fuzz(axiom: &Axiom, rule: &Rule, cfg: &FuzzConfig, claims: &ClaimsTable) -> Result<FuzzReport> {
    let mut report = FuzzReport {
        axiom: axiom.to_string(),
        rule: rule.name(),
        seed: cfg.seed,
        trials: cfg.trials,
        holds: 0,
        inconclusive: 0,
        skipped: 0,
        failures: Vec::new(),
        errors: Vec::new(),
        claimed: claims.is_claimed(rule, axiom),
    };
    for (trial, outcome) in fuzz_outcomes(axiom, rule, cfg).into_iter().enumerate() {
        match outcome {
            TrialOutcome::Skipped => report.skipped += 1,
            TrialOutcome::Error(e) => report.errors.push((trial as u64, e)),
            TrialOutcome::Checked(v) => match v.status {
                Status::Holds => report.holds += 1,
                Status::Inconclusive => report.inconclusive += 1,
                Status::Fails => {
                    let rechecked = v.recheck(rule, &cfg.check)?;
                    report.failures.push(FuzzFailure {
                        trial: trial as u64,
                        verdict: v,
                        rechecked,
                    });
                }
            },
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::q;

    #[test]
    fn same_seed_same_stream() {
        let cfg = FuzzConfig {
            trials: 50,
            seed: 3,
            ..FuzzConfig::default()
        };
        let rule = Rule::parse("mps:1/2").unwrap();
        let a = fuzz_outcomes(&Axiom::Rpc, &rule, &cfg);
        let b = fuzz_outcomes(&Axiom::Rpc, &rule, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn cut_breaks_afs_two() {
        let cfg = FuzzConfig {
            trials: 5000,
            seed: 11,
            ..FuzzConfig::default()
        };
        let rule = Rule::parse("cut").unwrap();
        let r = fuzz(&Axiom::AfsBound(q(2, 1)), &rule, &cfg, &ClaimsTable::default()).unwrap();
        assert!(!r.failures.is_empty(), "{}", r.summary_json());
        assert!(r.failures.iter().all(|f| f.rechecked));
        assert!(!r.violates_claim());
    }
}
