//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use budget_core::classic::{run_cut, run_fut, run_nash, verify_nash, NashSolverConfig};
use budget_core::consistency::{
    check_rpc_pair, check_spc_pair, check_wpc_pair, fuzz, random_profile, Axiom, CheckOptions, ClaimsTable,
    FuzzConfig, GeneratorConfig, Status,
};
use budget_core::corpus::*;
use budget_core::fairness::{
    afs_factor, brute_afs, chain_verdict, core_exact, core_lower_single, decompose, deviation_ratio, pf_score, Factor,
    VoterSet,
};
use budget_core::model::{q, ApprovalProfile, Distribution, ExactDistribution, Scalar, Q};
use budget_core::oracle::{AFS_LIMIT, CORE_LIMIT};
use budget_core::seqpay::{decomposition_from_trace, run_sequential, willingness_mps, PaymentWillingness};
use budget_core::Rule;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact(rule: &str, p: &ApprovalProfile) -> ExactDistribution {
    Rule::parse(rule).unwrap().apply(p).unwrap().as_exact().unwrap().clone()
}

fn shares(d: &ExactDistribution) -> String {
    d.render().join(", ")
}

fn ratios(v: &[(i64, i64)]) -> Vec<Q> {
    v.iter().map(|&(a, b)| q(a, b)).collect()
}

fn afs_value<T: Scalar>(p: &ApprovalProfile, d: &Distribution<T>) -> Factor<T> {
    afs_factor(p, d).unwrap().factor
}

fn instance(id: &str, params: &[&str]) -> NamedInstance {
    match emit(id, &parse_params(params).unwrap()).unwrap() {
        Generated::Instance(i) => *i,
        Generated::NotApplicable(why) => panic!("{id}: {why}"),
    }
}

/// A profile per trial, each from its own stream of `seed`.
fn fuzzed_profiles(seed: u64, count: u64, cfg: GeneratorConfig) -> Vec<ApprovalProfile> {
    (0..count)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            random_profile(&mut rng, &cfg)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let map = instance("map_example", &[]);
    let d = exact("map", map.profile("profile").unwrap());
    ensure(d.shares() == ratios(&[(8, 12), (0, 1), (3, 12), (1, 12)]), || format!("map example {}", shares(&d)))?;

    let cut = instance("cut_wpc", &[]);
    let p = ratios(&[(6, 10), (3, 10), (1, 10)]);
    for name in ["a", "b"] {
        let d = exact("cut", cut.profile(name).unwrap());
        ensure(d.shares() == p, || format!("cut on {name}: {}", shares(&d)))?;
    }
    let d = exact("cut", cut.profile("combined").unwrap());
    ensure(d.share(2) == &q(3, 20), || format!("cut combined {}", shares(&d)))?;

    let fut = instance("fut_wpc", &[]);
    let p = ratios(&[(8, 14), (4, 14), (2, 14)]);
    for name in ["a", "b"] {
        let d = exact("fut", fut.profile(name).unwrap());
        ensure(d.shares() == p, || format!("fut on {name}: {}", shares(&d)))?;
    }
    let d = exact("fut", fut.profile("combined").unwrap());
    ensure(d.share(1) == &q(9, 28), || format!("fut combined {}", shares(&d)))?;

    // candidate order b, a, c, d
    let sp = instance("map_strategyproofness", &[]);
    let t = exact("map", sp.profile("truthful").unwrap());
    let m = exact("map", sp.profile("manipulated").unwrap());
    let name = |d: &ExactDistribution, x: &str| d.share(sp.profile("truthful").unwrap().candidate_index(x).unwrap()).clone();
    let truthful: Vec<Q> = ["a", "b", "c", "d"].iter().map(|x| name(&t, x)).collect();
    let manipulated: Vec<Q> = ["a", "b", "c", "d"].iter().map(|x| name(&m, x)).collect();
    ensure(truthful == ratios(&[(5, 7), (0, 1), (0, 1), (2, 7)]), || format!("truthful {}", shares(&t)))?;
    ensure(manipulated == ratios(&[(0, 1), (4, 7), (3, 7), (0, 1)]), || format!("manipulated {}", shares(&m)))?;
    Ok("all shares match exactly".into())
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let cfg = NashSolverConfig::default();
    let small = instance("nash_rpc", &[]);
    let large = instance("nash_rpc_large", &[]);
    let cases: [(&NamedInstance, &str, [f64; 3], f64); 3] = [
        (&small, "a", [0.6, 0.0, 0.4], 1e-4),
        (&small, "b", [0.608, 0.157, 0.235], 2e-3),
        (&large, "combined", [153.0 / 300.0, 97.0 / 300.0, 50.0 / 300.0], 1e-4),
    ];
    for (inst, name, want, tol) in cases {
        let p = inst.profile(name).unwrap();
        let out = run_nash(p, &cfg).map_err(|e| e.to_string())?;
        let got = out.distribution.shares();
        ensure(got.iter().zip(want).all(|(g, w)| (g - w).abs() <= tol), || {
            format!("{}/{name}: {got:?}", inst.id)
        })?;
        ensure(verify_nash(p, &out.distribution, 1e-6).ok, || format!("{}/{name} fails verify_nash", inst.id))?;
    }
    for inst in [&small, &large] {
        for (name, p) in &inst.profiles {
            let out = run_nash(p, &cfg).map_err(|e| e.to_string())?;
            ensure(verify_nash(p, &out.distribution, 1e-6).ok, || format!("{}/{name} fails verify_nash", inst.id))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 10.0, || format!("took {secs:.1}s"))?;
    Ok(format!("all within tolerance, verified, {secs:.2}s"))
}

fn criterion_3() -> Outcome {
    let p = ApprovalProfile::from_names(
        &["a", "b1", "b2", "b3"],
        &[(1, &["a", "b1"]), (1, &["a", "b2"]), (1, &["a", "b3"]), (1, &["b1"]), (1, &["b2"]), (1, &["b3"])],
    )
    .unwrap();
    let d = ExactDistribution::new(ratios(&[(0, 1), (1, 3), (1, 3), (1, 3)])).unwrap();
    let afs = afs_value(&p, &d);
    let core = core_exact(&p, &d, CORE_LIMIT).unwrap().factor;
    ensure(afs == Factor::Finite(q(3, 2)) && core == Factor::Finite(q(3, 2)), || {
        format!("example audit afs {} core {}", afs.render(), core.render())
    })?;

    let mut values = Vec::new();
    for l in [3u64, 9, 30] {
        let inst = gen_map_afs_tight(l).unwrap();
        let p = inst.profile("profile").unwrap();
        let d = exact("map", p);
        let f = afs_value(p, &d);
        let want = q(2 * l as i64, l as i64 + 3);
        ensure(f == Factor::Finite(want.clone()), || format!("ℓ={l}: afs {}", f.render()))?;
        if p.n() <= 12 {
            let brute = brute_afs(p, &d, AFS_LIMIT).unwrap().factor;
            ensure(brute == f, || format!("ℓ={l}: brute {} vs {}", brute.render(), f.render()))?;
        }
        values.push(want);
    }
    ensure(values.windows(2).all(|w| w[0] < w[1]) && values.iter().all(|v| v < &q(2, 1)), || {
        "not increasing toward 2".into()
    })?;

    for k in [2u32, 3] {
        let inst = gen_map_core_family(k).unwrap();
        let p = inst.profile("profile").unwrap();
        let d = exact("map", p);
        let x_count = 1usize << (k - 1);
        let m = p.m();
        let mut target = vec![Q::zero(); m];
        for s in target.iter_mut().skip(m - x_count) {
            *s = q(1, x_count as i64);
        }
        let target = ExactDistribution::new(target).unwrap();
        let everyone = VoterSet {
            members: p.groups().iter().enumerate().map(|(g, grp)| (g, grp.count)).collect(),
        };
        let r = deviation_ratio(p, &d, &everyone, &target).unwrap();
        ensure(r.value().is_some_and(|v| v >= &q(k as i64, 2)), || format!("k={k}: ratio {}", r.render()))?;
    }
    let rendered: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    Ok(format!("example 3/2 and 3/2; tight family {}", rendered.join(" < ")))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let profiles = fuzzed_profiles(4, 10_000, GeneratorConfig::default());
    let mut rules: Vec<(String, PaymentWillingness, Q)> = vec![("map".into(), PaymentWillingness::builtin("map").unwrap(), q(2, 1))];
    for (a, b) in [(1, 5), (1, 3), (1, 2), (3, 4)] {
        let g = q(a, b);
        let bound = if g <= q(1, 3) { q(2, 1) / (Q::one() + &g) } else { Q::one() / (Q::one() - &g) };
        rules.push((format!("mps:{a}/{b}"), willingness_mps(g).unwrap(), bound));
    }
    let third = willingness_mps(q(1, 3)).unwrap();
    let violations: Vec<String> = profiles
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, p)| {
            let mut bad = Vec::new();
            for (name, pi, bound) in &rules {
                let (d, _) = run_sequential(p, pi).unwrap();
                let f = afs_value(p, &d);
                if f.value().is_none_or(|v| v > bound) {
                    bad.push(format!("trial {i}: {name} afs {}", f.render()));
                }
            }
            let (d, _) = run_sequential(p, &third).unwrap();
            let t = p.max_ballot_size() as u32;
            let strat = q(3, 2) * (Q::one() - q(1, 3i64.pow(t)));
            let f = afs_value(p, &d);
            if f.value().is_none_or(|v| v > &strat) {
                bad.push(format!("trial {i}: mps:1/3 afs {} above {} for t={t}", f.render(), strat));
            }
            bad
        })
        .collect();
    ensure(violations.is_empty(), || violations.iter().take(3).cloned().collect::<Vec<_>>().join("; "))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("10000 profiles, 6 bounds, 0 violations, {secs:.1}s"))
}

fn criterion_5() -> Outcome {
    let cfg = GeneratorConfig {
        max_voters: 10,
        ..GeneratorConfig::default()
    };
    let profiles = fuzzed_profiles(5, 500, cfg);
    let bad: Vec<String> = profiles
        .par_iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let d = exact("ues", p);
            let fast = afs_value(p, &d);
            let brute = brute_afs(p, &d, AFS_LIMIT).unwrap().factor;
            (fast != brute).then(|| format!("trial {i}: afs {} vs brute {}", fast.render(), brute.render()))
        })
        .collect();
    ensure(bad.is_empty(), || bad.join("; "))?;

    let rules = ["map", "ues", "mps:1/3", "cut", "fut"];
    let bad: Vec<String> = profiles[..200]
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, p)| {
            let rule = rules[i % rules.len()];
            let d = exact(rule, p);
            let lower = core_lower_single(p, &d).unwrap().factor;
            let core = core_exact(p, &d, CORE_LIMIT).unwrap().factor;
            let pf = pf_score(p, &d).unwrap().factor;
            let afs = afs_value(p, &d);
            let mut bad = Vec::new();
            if lower.cmp_tol(&core, 0.0).is_gt() || core.cmp_tol(&pf, 0.0).is_gt() {
                bad.push(format!("trial {i} {rule}: {} ≤ {} ≤ {} fails", lower.render(), core.render(), pf.render()));
            }
            if !chain_verdict(p.n(), &afs, &core, 1e-9).holds() {
                bad.push(format!("trial {i} {rule}: chain fails for afs {} core {}", afs.render(), core.render()));
            }
            bad
        })
        .collect();
    ensure(bad.is_empty(), || bad.join("; "))?;
    Ok("500 afs matches, 200 core sandwiches and chains".into())
}

fn criterion_6() -> Outcome {
    let claims = ClaimsTable::default();
    let run = |axiom: Axiom, rule: &str, trials: usize| -> Result<String, String> {
        let cfg = FuzzConfig {
            seed: 6,
            trials,
            ..FuzzConfig::default()
        };
        let r = fuzz(&axiom, &Rule::parse(rule).unwrap(), &cfg, &claims).map_err(|e| e.to_string())?;
        ensure(r.failures.is_empty() && r.errors.is_empty(), || {
            format!("{axiom} {rule}: {} failures {} errors", r.failures.len(), r.errors.len())
        })?;
        Ok(format!("{axiom} {rule} {}/{}", r.holds, trials))
    };
    let mut done = Vec::new();
    for rule in ["map", "ues"] {
        done.push(run(Axiom::Monotonicity, rule, 10_000)?);
    }
    for rule in ["map", "ues", "mps:1/4", "mps:1/3", "mps:1/2", "add13"] {
        done.push(run(Axiom::Rpc, rule, 5_000)?);
    }
    done.push(run(Axiom::Spc, "ues", 5_000)?);
    for rule in ["mps:1/2", "mps:1/4"] {
        let inst = instance("nonmonotone", &[&format!("rule={rule}")]);
        let checks = inst.verify().map_err(|e| e.to_string())?;
        ensure(checks.iter().all(|c| c.passed), || format!("nonmonotone {rule} not verified"))?;
        ensure(
            inst.expected.iter().any(|e| matches!(e, Expectation::StepViolation { .. })),
            || format!("nonmonotone {rule} has no step witness"),
        )?;
    }
    for rule in ["map", "ues"] {
        let got = gen_nonmonotone(&PaymentWillingness::builtin(rule).unwrap()).map_err(|e| e.to_string())?;
        ensure(matches!(got, Generated::NotApplicable(_)), || format!("nonmonotone {rule} applicable"))?;
    }
    Ok(format!("{}; violations built for mps:1/2, mps:1/4", done.join(", ")))
}

fn criterion_7() -> Outcome {
    let opts = CheckOptions::default();
    for id in ["cut_wpc", "fut_wpc"] {
        let inst = instance(id, &[]);
        let rule = Rule::parse(&id[..3]).unwrap();
        let v = check_wpc_pair(&rule, inst.profile("a").unwrap(), inst.profile("b").unwrap(), &opts).unwrap();
        ensure(v.status == Status::Fails, || format!("{id}: wpc {}", v.status))?;
    }
    let nash = Rule::parse("nash").unwrap();
    for (id, at) in [("nash_rpc", 0), ("nash_rpc_large", 1)] {
        let inst = instance(id, &[]);
        let v = check_rpc_pair(&nash, inst.profile("a").unwrap(), inst.profile("b").unwrap(), &opts).unwrap();
        let cand = v.witness.as_ref().and_then(|w| w.candidate);
        ensure(v.status == Status::Fails && cand == Some(at), || format!("{id}: {} at {cand:?}", v.status))?;
    }
    let large = instance("nash_rpc_large", &[]);
    let r = nash.apply(large.profile("combined").unwrap()).unwrap().to_f64();
    ensure((r.share(1) - 97.0 / 300.0).abs() <= 1e-4, || format!("r(b) = {}", r.share(1)))?;
    Ok(format!("wpc fails for cut and fut; rpc fails at a and at b, r(b) = {:.6}", r.share(1)))
}

fn criterion_8() -> Outcome {
    let mut out = Vec::new();
    for n in [8u64, 12] {
        let inst = gen_cut_lb(n).unwrap();
        let p = inst.profile("profile").unwrap();
        let f = afs_value(p, &exact("cut", p));
        ensure(f.value().is_none_or(|v| v >= &q(n as i64 / 2 - 1, 1)), || format!("cut n={n}: {}", f.render()))?;
        out.push(format!("cut({n}) {}", f.render()));
    }
    for n in [6u64, 9] {
        let inst = gen_fut_lb(n).unwrap();
        let p = inst.profile("profile").unwrap();
        let d = exact("fut", p);
        let f = afs_value(p, &d);
        ensure(f.value().is_none_or(|v| v >= &q(n as i64 / 3 - 1, 1)), || format!("fut n={n}: {}", f.render()))?;
        let y = p.candidate_index("y").unwrap();
        ensure(d.share(y) == &(q(2, 3) + q(1, n as i64)), || format!("fut n={n}: p(y) = {}", d.share(y)))?;
        out.push(format!("fut({n}) {}", f.render()));
    }
    for n in [3i64, 4] {
        let inst = gen_ues_lb(n as u64).unwrap();
        let p = inst.profile("profile").unwrap();
        let f = afs_value(p, &exact("ues", p));
        ensure(f == Factor::Finite(q(n * n, 2 * n - 1)), || format!("ues n={n}: {}", f.render()))?;
        out.push(format!("ues({n}) {}", f.render()));
    }
    Ok(out.join(", "))
}

fn decomposition_profiles() -> Vec<ApprovalProfile> {
    let mut ps = fuzzed_profiles(9, 300, GeneratorConfig::default());
    for id in ["map_example", "cut_wpc", "fut_wpc", "spc_impossibility", "map_strategyproofness"] {
        ps.extend(instance(id, &[]).profiles.into_iter().map(|(_, p)| p));
    }
    ps
}

fn criterion_9() -> Outcome {
    let profiles = decomposition_profiles();
    let seq: Vec<PaymentWillingness> = ["map", "ues", "mps:1/3", "mps:1/2", "add13"]
        .iter()
        .map(|r| PaymentWillingness::builtin(r).unwrap())
        .collect();
    let bad: Vec<String> = profiles
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, p)| {
            let mut bad = Vec::new();
            let mut outputs = Vec::new();
            for pi in &seq {
                let (d, trace) = run_sequential(p, pi).unwrap();
                let dec = decomposition_from_trace(&trace, p).unwrap();
                outputs.push((pi.name().to_string(), d, dec));
            }
            let (d, dec) = run_cut(p);
            outputs.push(("cut".into(), d, dec));
            let (d, dec, _) = run_fut(p);
            outputs.push(("fut".into(), d, dec));
            for (name, d, dec) in &outputs {
                if &dec.aggregate(p) != d {
                    bad.push(format!("{i} {name}: reconstruction differs"));
                }
                if !decompose(p, d).is_feasible() {
                    bad.push(format!("{i} {name}: flow finds no decomposition"));
                }
            }
            let nash = run_nash(p, &NashSolverConfig::default()).unwrap();
            if !decompose(p, &nash.distribution).is_feasible() {
                bad.push(format!("{i} nash: flow finds no decomposition"));
            }
            bad
        })
        .collect();
    ensure(bad.is_empty(), || bad.iter().take(3).cloned().collect::<Vec<_>>().join("; "))?;
    Ok(format!("{} profiles × 8 rules decompose", profiles.len()))
}

fn criterion_10() -> Outcome {
    let inst = instance("spc_impossibility", &[]);
    let opts = CheckOptions::default();
    let map = Rule::parse("map").unwrap();
    let mut failing = Vec::new();
    for (a, b) in [("p1", "p2"), ("p3", "p4")] {
        let v = check_spc_pair(&map, inst.profile(a).unwrap(), inst.profile(b).unwrap(), &opts).unwrap();
        if v.status == Status::Fails {
            failing.push(format!("({a}, {b})"));
        }
    }
    ensure(!failing.is_empty(), || "MAP passes SPC on both pairs".into())?;
    Ok(format!("MAP fails SPC on {}", failing.join(" ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact regression", criterion_1),
        ("nash numerics", criterion_2),
        ("fairness factors", criterion_3),
        ("upper-bound fuzz", criterion_4),
        ("oracle equivalence", criterion_5),
        ("axiom fuzz", criterion_6),
        ("consistency counterexamples", criterion_7),
        ("lower-bound families", criterion_8),
        ("decomposability", criterion_9),
        ("spc impossibility", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.2}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
