use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use budget_core::consistency::{check, fuzz, Axiom, CheckInput, CheckOptions, ClaimsTable, FuzzConfig, GeneratorConfig, Status};
use budget_core::corpus::{self, Generated};
use budget_core::fairness::{audit_any, AuditOptions};
use budget_core::model::{parse_distribution, parse_profile, AnyDistribution, ApprovalProfile, Scalar};
use budget_core::seqpay::PaymentWillingness;
use budget_core::{Rule, RuleOutput};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const OK: u8 = 0;
const VIOLATION: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "budget", version, about = "Approval-based budget division rules and audits")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Also print rationals as decimals with this many digits.
    #[arg(long, global = true, value_name = "K")]
    decimal: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a rule on a profile.
    Run {
        /// map, ues, add13, mps:γ, cut, fut, nash or custom:<file>
        rule: String,
        /// Profile file: `candidates: a b c` then `count: ballot` lines
        profile: PathBuf,
        /// Print per-round detail.
        #[arg(long)]
        trace: bool,
        /// Audit the output as well.
        #[arg(long)]
        audit: bool,
        /// Also compute the exact core factor (n ≤ 14)
        #[arg(long)]
        exact_core: bool,
    },
    /// Fairness audit of a rule output or a distribution file.
    Audit {
        profile: PathBuf,
        /// A rule spec, or a path to a distribution file.
        source: String,
        /// Also compute the exact core factor (n ≤ 14)
        #[arg(long)]
        exact_core: bool,
    },
    /// Check one axiom on explicit inputs.
    Check {
        /// monotonicity, wpc, spc, rpc, unanimity, afs_bound:α or core_bound:α
        axiom: String,
        rule: String,
        /// One profile, or two for population consistency.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Voter group extended by a monotonicity step (0-based).
        #[arg(long)]
        group: Option<usize>,
        /// Candidate added by a monotonicity step.
        #[arg(long)]
        candidate: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Seeded random search for axiom violations.
    Fuzz {
        axiom: String,
        rule: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 12)]
        max_voters: u64,
        #[arg(long, default_value_t = 6)]
        max_candidates: usize,
        #[arg(long, default_value_t = 4)]
        max_ballot: usize,
        /// JSON file overriding the built-in claims table.
        #[arg(long)]
        claims: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Named counterexample profiles.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// List instance ids with their parameters.
    List,
    /// Write an instance's profiles and expected-results sidecar.
    Emit {
        id: String,
        /// Parameters as key=value.
        params: Vec<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Re-derive every expectation; exit 1 if one fails.
        #[arg(long)]
        verify: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Run {
            rule,
            profile,
            trace,
            audit,
            exact_core,
        } => cmd_run(cli, rule, profile, *trace, audit.then_some(*exact_core)),
        Command::Audit {
            profile,
            source,
            exact_core,
        } => cmd_audit(cli, profile, source, *exact_core),
        Command::Check {
            axiom,
            rule,
            inputs,
            group,
            candidate,
            tol,
        } => cmd_check(cli, axiom, rule, inputs, *group, candidate.as_deref(), *tol),
        Command::Fuzz {
            axiom,
            rule,
            seed,
            trials,
            max_voters,
            max_candidates,
            max_ballot,
            claims,
            tol,
        } => {
            let cfg = FuzzConfig {
                generator: GeneratorConfig {
                    max_voters: *max_voters,
                    max_candidates: *max_candidates,
                    max_ballot: *max_ballot,
                },
                seed: *seed,
                trials: *trials,
                check: CheckOptions {
                    tol: *tol,
                    ..CheckOptions::default()
                },
            };
            cmd_fuzz(cli, axiom, rule, &cfg, claims.as_deref())
        }
        Command::Corpus { command } => match command {
            CorpusCommand::List => cmd_corpus_list(cli),
            CorpusCommand::Emit {
                id,
                params,
                out,
                verify,
            } => cmd_corpus_emit(cli, id, params, out, *verify),
        },
    }
}

fn parse_rule(spec: &str) -> Result<Rule> {
    if let Some(path) = spec.strip_prefix("custom:") {
        let src = fs::read_to_string(path).with_context(|| format!("cannot read willingness file {path}"))?;
        return Ok(Rule::Sequential(PaymentWillingness::from_json(&src)?));
    }
    Ok(Rule::parse(spec)?)
}

fn read_profile(path: &Path) -> Result<(ApprovalProfile, String)> {
    let bytes = fs::read(path).with_context(|| format!("cannot read profile {}", path.display()))?;
    let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    let src = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let profile = parse_profile(&src).with_context(|| format!("in {}", path.display()))?;
    Ok((profile, digest))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json renders"));
}

fn decimals(d: &AnyDistribution, k: usize) -> Vec<String> {
    d.to_f64().shares().iter().map(|s| format!("{s:.k$}")).collect()
}

fn render_distribution(cli: &Cli, profile: &ApprovalProfile, d: &AnyDistribution) -> String {
    let dec = cli.decimal.map(|k| decimals(d, k));
    d.render()
        .iter()
        .enumerate()
        .map(|(x, s)| match &dec {
            Some(dec) if d.is_exact() => format!("{}: {s} ({})\n", profile.name(x), dec[x]),
            _ => format!("{}: {s}\n", profile.name(x)),
        })
        .collect()
}

fn distribution_json(cli: &Cli, profile: &ApprovalProfile, d: &AnyDistribution) -> Value {
    let mut v = json!({
        "backend": if d.is_exact() { "exact" } else { "float" },
        "shares": d.to_json(profile),
        "float": d.to_f64().shares().iter().map(|s| s.to_json()).collect::<Vec<_>>(),
    });
    if let Some(k) = cli.decimal {
        v["decimal"] = json!(decimals(d, k));
    }
    v
}

fn trace_text(profile: &ApprovalProfile, out: &RuleOutput) -> String {
    let mut s = String::new();
    if let Some(tr) = &out.trace {
        for r in &tr.rounds {
            s += &format!("round {}: {} total willingness {}\n", r.index + 1, profile.name(r.candidate), r.total.render());
        }
    }
    if let Some(events) = &out.fut_events {
        for e in events {
            s += &format!("{e:?}\n");
        }
    }
    if let Some(n) = &out.nash {
        s += &format!("iterations {} residual {:e}\n", n.iterations, n.residual);
    }
    s
}

fn trace_json(profile: &ApprovalProfile, out: &RuleOutput) -> Value {
    if let Some(tr) = &out.trace {
        return tr.to_json(profile);
    }
    if let Some(events) = &out.fut_events {
        return json!(events.iter().map(|e| format!("{e:?}")).collect::<Vec<_>>());
    }
    match &out.nash {
        Some(n) => json!({"iterations": n.iterations, "residual": n.residual}),
        None => Value::Null,
    }
}

fn cmd_run(cli: &Cli, spec: &str, path: &Path, trace: bool, audit: Option<bool>) -> Result<u8> {
    let rule = parse_rule(spec)?;
    let (profile, digest) = read_profile(path)?;
    let out = rule.run(&profile)?;
    let audited = audit
        .map(|exact_core| {
            let opts = AuditOptions {
                exact_core,
                ..AuditOptions::default()
            };
            audit_any(&profile, &out.distribution, &opts)
        })
        .transpose()?;
    if cli.json {
        let mut report = json!({
            "rule": rule.name(),
            "input_digest": digest,
            "distribution": distribution_json(cli, &profile, &out.distribution),
        });
        if trace {
            report["trace"] = trace_json(&profile, &out);
        }
        if let Some(a) = &audited {
            report["audit"] = a.to_json(&profile);
        }
        print_json(&report);
    } else {
        print!("{}", render_distribution(cli, &profile, &out.distribution));
        if trace {
            print!("{}", trace_text(&profile, &out));
        }
        if let Some(a) = &audited {
            print!("{}", a.render_text(&profile));
        }
    }
    Ok(OK)
}

fn cmd_audit(cli: &Cli, path: &Path, source: &str, exact_core: bool) -> Result<u8> {
    let (profile, digest) = read_profile(path)?;
    let (label, d) = if Path::new(source).is_file() {
        let src = fs::read_to_string(source)?;
        (source.to_string(), parse_distribution(&profile, &src)?)
    } else {
        let rule = parse_rule(source).map_err(|e| anyhow!("{source} is neither a file nor a rule: {e}"))?;
        (rule.name(), rule.apply(&profile)?)
    };
    let opts = AuditOptions {
        exact_core,
        ..AuditOptions::default()
    };
    let a = audit_any(&profile, &d, &opts)?;
    if cli.json {
        print_json(&json!({
            "source": label,
            "input_digest": digest,
            "distribution": distribution_json(cli, &profile, &d),
            "audit": a.to_json(&profile),
        }));
    } else {
        print!("{}", render_distribution(cli, &profile, &d));
        print!("{}", a.render_text(&profile));
    }
    Ok(OK)
}

fn cmd_check(
    cli: &Cli,
    axiom: &str,
    spec: &str,
    inputs: &[PathBuf],
    group: Option<usize>,
    candidate: Option<&str>,
    tol: f64,
) -> Result<u8> {
    let axiom = Axiom::parse(axiom)?;
    let rule = parse_rule(spec)?;
    let profiles = inputs
        .iter()
        .map(|p| read_profile(p).map(|(p, _)| p))
        .collect::<Result<Vec<_>>>()?;
    let input = match (&axiom, profiles.as_slice()) {
        (Axiom::Monotonicity, [p]) => {
            let (Some(group), Some(name)) = (group, candidate) else {
                bail!("monotonicity needs --group and --candidate");
            };
            let x = p.candidate_index(name).ok_or_else(|| anyhow!("unknown candidate {name}"))?;
            CheckInput::Step {
                profile: p.clone(),
                group,
                candidate: x,
            }
        }
        (Axiom::Wpc | Axiom::Spc | Axiom::Rpc, [a, b]) => CheckInput::Pair(a.clone(), b.clone()),
        (Axiom::Unanimity | Axiom::AfsBound(_) | Axiom::CoreBound(_), [p]) => CheckInput::Single(p.clone()),
        _ => bail!("axiom {axiom} does not take {} profile(s)", profiles.len()),
    };
    let opts = CheckOptions {
        tol,
        ..CheckOptions::default()
    };
    let v = check(&axiom, &rule, &input, &opts)?;
    if cli.json {
        print_json(&v.to_json());
    } else {
        println!("{}", v.render_text());
    }
    Ok(if v.status == Status::Fails { VIOLATION } else { OK })
}

fn cmd_fuzz(cli: &Cli, axiom: &str, spec: &str, cfg: &FuzzConfig, claims: Option<&Path>) -> Result<u8> {
    let axiom = Axiom::parse(axiom)?;
    let rule = parse_rule(spec)?;
    let table = match claims {
        Some(p) => ClaimsTable::from_json(&fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?)?,
        None => ClaimsTable::default(),
    };
    let report = fuzz(&axiom, &rule, cfg, &table)?;
    if cli.json {
        for line in report.to_json_lines() {
            println!("{line}");
        }
    } else {
        for f in &report.failures {
            println!("trial {}: {}", f.trial, f.verdict.render_text());
        }
        for (t, e) in &report.errors {
            println!("trial {t}: error: {e}");
        }
        println!(
            "{} / {}: {} trials, {} hold, {} fail, {} inconclusive, {} skipped, {} errors ({})",
            report.axiom,
            report.rule,
            report.trials,
            report.holds,
            report.failures.len(),
            report.inconclusive,
            report.skipped,
            report.errors.len(),
            if report.claimed { "claimed" } else { "not claimed" },
        );
    }
    Ok(if report.violates_claim() { VIOLATION } else { OK })
}

fn cmd_corpus_list(cli: &Cli) -> Result<u8> {
    if cli.json {
        let entries: Vec<Value> = corpus::CATALOG
            .iter()
            .map(|e| {
                json!({
                    "id": e.id,
                    "params": e.params.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<BTreeMap<_, _>>(),
                    "summary": e.summary,
                })
            })
            .collect();
        print_json(&json!(entries));
    } else {
        for e in corpus::CATALOG {
            let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!("{:<22} {:<40} {}", e.id, params.join(" "), e.summary);
        }
    }
    Ok(OK)
}

fn cmd_corpus_emit(cli: &Cli, id: &str, params: &[String], out: &Path, verify: bool) -> Result<u8> {
    let params = corpus::parse_params(params)?;
    let inst = match corpus::emit(id, &params)? {
        Generated::Instance(inst) => inst,
        Generated::NotApplicable(why) => {
            if cli.json {
                print_json(&json!({"id": id, "not_applicable": why}));
            } else {
                println!("not applicable: {why}");
            }
            return Ok(OK);
        }
    };
    let written = inst.write_files(out)?;
    let checks = if verify { Some(inst.verify()?) } else { None };
    let failed = checks.iter().flatten().any(|c| !c.passed);
    if cli.json {
        let mut v = json!({
            "id": inst.id,
            "files": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        });
        if let Some(cs) = &checks {
            v["checks"] = json!(cs
                .iter()
                .map(|c| json!({"expectation": c.label, "passed": c.passed, "detail": c.detail}))
                .collect::<Vec<_>>());
        }
        print_json(&v);
    } else {
        for p in &written {
            println!("{}", p.display());
        }
        for c in checks.iter().flatten() {
            println!("{} {} ({})", if c.passed { "ok  " } else { "FAIL" }, c.label, c.detail);
        }
    }
    Ok(if failed { VIOLATION } else { OK })
}
