use crate::consistency::Axiom;
use crate::model::{q, ApprovalProfile, Q};

use super::instance::{Expectation, NamedInstance};

fn fixed(cands: &[&str], rows: &[(u64, &[&str])]) -> ApprovalProfile {
    ApprovalProfile::from_names(cands, rows).expect("fixed corpus profile")
}

fn combined(a: &ApprovalProfile, b: &ApprovalProfile) -> ApprovalProfile {
    a.combine(b).expect("common universe")
}

fn shares(rule: &str, profile: &str, s: &[(&str, Q)]) -> Expectation {
    Expectation::Shares {
        rule: rule.into(),
        profile: profile.into(),
        shares: s.iter().map(|(n, v)| (n.to_string(), v.clone())).collect(),
    }
}

fn approx(rule: &str, profile: &str, s: &[(&str, f64)], tol: f64) -> Expectation {
    Expectation::ApproxShares {
        rule: rule.into(),
        profile: profile.into(),
        shares: s.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
        tol,
    }
}

fn pair_violation(axiom: Axiom, rule: &str, candidate: Option<&str>) -> Expectation {
    Expectation::PairViolation {
        axiom,
        rule: rule.into(),
        a: "a".into(),
        b: "b".into(),
        candidate: candidate.map(str::to_string),
    }
}

/// MAP on a small five-group profile.
pub fn gen_map_example() -> NamedInstance {
    let p = fixed(
        &["a", "b", "c", "d"],
        &[(4, &["a", "b"]), (4, &["a"]), (2, &["b", "c"]), (1, &["c", "d"]), (1, &["d"])],
    );
    NamedInstance::new("map_example", "MAP funds a, then c, then d")
        .with_profile("profile", p)
        .expect(shares(
            "map",
            "profile",
            &[("a", q(8, 12)), ("b", q(0, 1)), ("c", q(3, 12)), ("d", q(1, 12))],
        ))
}

/// Four voters whose two splits into halves no unanimous rule can treat
/// consistently.
pub fn gen_spc_impossibility() -> NamedInstance {
    let c = ["a1", "a2", "b1", "b2"];
    let full = fixed(
        &c,
        &[(1, &["a1", "b1"]), (1, &["a1", "b2"]), (1, &["a2", "b1"]), (1, &["a2", "b2"])],
    );
    let p1 = fixed(&c, &[(1, &["a1", "b1"]), (1, &["a1", "b2"])]);
    let p2 = fixed(&c, &[(1, &["a2", "b1"]), (1, &["a2", "b2"])]);
    let p3 = fixed(&c, &[(1, &["a1", "b1"]), (1, &["a2", "b1"])]);
    let p4 = fixed(&c, &[(1, &["a1", "b2"]), (1, &["a2", "b2"])]);
    let mut inst = NamedInstance::new(
        "spc_impossibility",
        "every unanimous rule breaks strict population consistency on one of two splits",
    )
    .with_profile("full", full)
    .with_profile("p1", p1)
    .with_profile("p2", p2)
    .with_profile("p3", p3)
    .with_profile("p4", p4)
    .expect(shares("map", "p1", &[("a1", q(1, 1))]))
    .expect(shares("map", "p2", &[("a2", q(1, 1))]))
    .expect(shares("map", "p3", &[("b1", q(1, 1))]))
    .expect(shares("map", "p4", &[("b2", q(1, 1))]));
    for rule in ["map", "mps:1/3"] {
        inst = inst.expect(Expectation::AnyPairViolation {
            axiom: Axiom::Spc,
            rule: rule.into(),
            pairs: vec![("p1".into(), "p2".into()), ("p3".into(), "p4".into())],
        });
    }
    inst
}

/// CUT picks the same distribution on both halves but not on their union.
pub fn gen_cut_wpc() -> NamedInstance {
    let c = ["a", "b", "c"];
    let a = fixed(&c, &[(2, &["a"]), (4, &["a", "c"]), (1, &["c"]), (3, &["b"])]);
    let b = fixed(&c, &[(6, &["a"]), (2, &["b"]), (1, &["b", "c"]), (1, &["c"])]);
    let ab = combined(&a, &b);
    let p = [("a", q(6, 10)), ("b", q(3, 10)), ("c", q(1, 10))];
    NamedInstance::new("cut_wpc", "CUT violates weak population consistency")
        .with_profile("a", a)
        .with_profile("b", b)
        .with_profile("combined", ab)
        .expect(shares("cut", "a", &p))
        .expect(shares("cut", "b", &p))
        .expect(shares("cut", "combined", &[("a", q(6, 10)), ("c", q(3, 20))]))
        .expect(pair_violation(Axiom::Wpc, "cut", None))
}

/// FUT picks the same distribution on both halves but not on their union.
pub fn gen_fut_wpc() -> NamedInstance {
    let c = ["a", "b", "c"];
    let a = fixed(
        &c,
        &[(3, &["a"]), (5, &["a", "c"]), (1, &["c"]), (1, &["b", "c"]), (4, &["b"])],
    );
    let b = fixed(&c, &[(6, &["a"]), (2, &["a", "b"]), (4, &["b"]), (2, &["c"])]);
    let ab = combined(&a, &b);
    let p = [("a", q(8, 14)), ("b", q(4, 14)), ("c", q(2, 14))];
    NamedInstance::new("fut_wpc", "FUT violates weak population consistency")
        .with_profile("a", a)
        .with_profile("b", b)
        .with_profile("combined", ab)
        .expect(shares("fut", "a", &p))
        .expect(shares("fut", "b", &p))
        .expect(shares("fut", "combined", &[("a", q(8, 14)), ("b", q(9, 28))]))
        .expect(pair_violation(Axiom::Wpc, "fut", None))
}

/// Nash lowers the top candidate of two equally ranked halves.
pub fn gen_nash_rpc() -> NamedInstance {
    let c = ["a", "b", "c"];
    let a = fixed(&c, &[(3, &["a"]), (2, &["b", "c"]), (2, &["c"]), (3, &["a", "b"])]);
    let b = fixed(
        &c,
        &[(1, &["a"]), (1, &["b"]), (1, &["c"]), (2, &["a", "b"]), (4, &["a", "c"])],
    );
    let ab = combined(&a, &b);
    NamedInstance::new("nash_rpc", "Nash violates ranked population consistency at its top candidate")
        .with_profile("a", a)
        .with_profile("b", b)
        .with_profile("combined", ab)
        .expect(approx("nash", "a", &[("a", 0.6), ("b", 0.0), ("c", 0.4)], 1e-4))
        .expect(approx("nash", "b", &[("a", 0.608), ("b", 0.157), ("c", 0.235)], 1e-3))
        .expect(approx("nash", "combined", &[("a", 0.558), ("b", 0.137), ("c", 0.305)], 1e-3))
        .expect(pair_violation(Axiom::Rpc, "nash", Some("a")))
}

/// Nash lifts a candidate with share zero on both halves.
pub fn gen_nash_rpc_large() -> NamedInstance {
    let c = ["a", "b", "c"];
    let a = fixed(&c, &[(50, &["a"]), (49, &["b", "c"]), (49, &["c"]), (50, &["a", "b"])]);
    let b = fixed(&c, &[(1, &["a"]), (1, &["c"]), (200, &["a", "b"])]);
    let ab = combined(&a, &b);
    NamedInstance::new("nash_rpc_large", "Nash raises a zero-share candidate to almost a third")
        .with_profile("a", a)
        .with_profile("b", b)
        .with_profile("combined", ab)
        .expect(approx("nash", "a", &[("a", 50.0 / 99.0), ("b", 0.0), ("c", 49.0 / 99.0)], 1e-4))
        .expect(approx("nash", "b", &[("a", 201.0 / 202.0), ("b", 0.0), ("c", 1.0 / 202.0)], 1e-4))
        .expect(approx(
            "nash",
            "combined",
            &[("a", 153.0 / 300.0), ("b", 97.0 / 300.0), ("c", 50.0 / 300.0)],
            1e-4,
        ))
        .expect(pair_violation(Axiom::Rpc, "nash", Some("b")))
}

/// One voter of the first group gains by hiding `a`; `b` wins ties.
pub fn gen_map_strategyproofness() -> NamedInstance {
    let c = ["b", "a", "c", "d"];
    let rest: [(u64, &[&str]); 4] = [(2, &["a", "b"]), (2, &["a", "c"]), (1, &["b", "d"]), (1, &["c", "d"])];
    let mut truthful: Vec<(u64, &[&str])> = vec![(1, &["a", "b", "c"])];
    truthful.extend(rest);
    let mut manipulated: Vec<(u64, &[&str])> = vec![(1, &["b", "c"])];
    manipulated.extend(rest);
    let truth_ballot = vec![vec!["a".to_string(), "b".into(), "c".into()]];
    NamedInstance::new("map_strategyproofness", "MAP is manipulable")
        .with_profile("truthful", fixed(&c, &truthful))
        .with_profile("manipulated", fixed(&c, &manipulated))
        .expect(shares(
            "map",
            "truthful",
            &[("a", q(5, 7)), ("b", q(0, 1)), ("c", q(0, 1)), ("d", q(2, 7))],
        ))
        .expect(shares(
            "map",
            "manipulated",
            &[("a", q(0, 1)), ("b", q(4, 7)), ("c", q(3, 7)), ("d", q(0, 1))],
        ))
        .expect(Expectation::Utility {
            rule: "map".into(),
            profile: "truthful".into(),
            ballots: truth_ballot.clone(),
            value: q(5, 7),
        })
        .expect(Expectation::Utility {
            rule: "map".into(),
            profile: "manipulated".into(),
            ballots: truth_ballot,
            value: q(1, 1),
        })
}
