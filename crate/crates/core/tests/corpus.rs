use std::collections::BTreeMap;

use budget_core::corpus::*;
use budget_core::fairness::afs_factor;
use budget_core::model::{parse_profile_text, q, Q};
use budget_core::seqpay::{run_sequential, willingness_mps, PaymentWillingness};
use budget_core::{Error, Rule};

fn all_pass(inst: &NamedInstance) {
    for c in inst.verify().unwrap() {
        assert!(c.passed, "{}: {} ({})", inst.id, c.label, c.detail);
    }
}

fn nonmonotone(pi: &PaymentWillingness) -> NamedInstance {
    match gen_nonmonotone(pi).unwrap() {
        Generated::Instance(i) => *i,
        Generated::NotApplicable(why) => panic!("{}: {why}", pi.name()),
    }
}

#[test]
fn nonmonotone_for_each_family_member() {
    let cases = [("mps:1/2", (4, 9, 12)), ("mps:1/4", (6, 9, 10)), ("mps:3/4", (3, 13, 20))];
    for (rule, (t1, t2, t3)) in cases {
        let inst = nonmonotone(&PaymentWillingness::builtin(rule).unwrap());
        let p = nonmonotone_params(&inst).unwrap();
        assert_eq!((p.t1, p.t2, p.t3), (t1, t2, t3), "{rule}");
        assert!(p.n_x >= t1 + t2 + t3 && p.n_y >= t1 + t2 + t3 && p.n_z >= t1 + t2 + t3);
        all_pass(&inst);
    }
    all_pass(&nonmonotone(&PaymentWillingness::builtin("add13").unwrap()));
}

#[test]
fn nonmonotone_custom_table() {
    // MAP up to size 2, then a decreasing split
    let pi = PaymentWillingness::from_json(
        r#"{"name":"late","entries":{"1":["1"],"2":["1","0"],"3":["1/2","1/3","1/6"],"4":["1/2","1/4","1/8","1/8"]}}"#,
    )
    .unwrap();
    let inst = nonmonotone(&pi);
    let p = nonmonotone_params(&inst).unwrap();
    assert_eq!((p.l1, p.l2, p.k), (2, 2, 1));
    all_pass(&inst);
}

#[test]
fn nonmonotone_not_applicable() {
    for pi in [PaymentWillingness::builtin("map").unwrap(), PaymentWillingness::builtin("ues").unwrap()] {
        assert!(matches!(gen_nonmonotone(&pi).unwrap(), Generated::NotApplicable(_)));
    }
}

#[test]
fn core_family_matches_printed_table() {
    let inst = gen_map_core_family(3).unwrap();
    let want = "candidates: y1_1 y2_1 y2_2 y3_1 y3_2 y3_3 y3_4 x1 x2 x3 x4
2: y1_1 x1 x2
2: y1_1 x3 x4
1: y2_1 x1
1: y2_1 x2
1: y2_2 x3
1: y2_2 x4
1: y3_1 x1
1: y3_2 x2
1: y3_3 x3
1: y3_4 x4
";
    assert_eq!(inst.profile("profile").unwrap(), &parse_profile_text(want).unwrap());
    let d = Rule::parse("map").unwrap().apply(inst.profile("profile").unwrap()).unwrap();
    assert_eq!(d.as_exact().unwrap().share(0), &q(1, 3));
    all_pass(&inst);
    for k in [2, 4, 5] {
        let inst = gen_map_core_family(k).unwrap();
        let p = inst.profile("profile").unwrap();
        assert_eq!(p.n(), k as u64 * (1 << (k - 1)));
        assert_eq!(p.m(), 3 * (1 << (k - 1)) - 1);
        all_pass(&inst);
    }
    assert!(gen_map_core_family(1).is_err());
}

#[test]
fn lower_bound_families() {
    let cut = gen_cut_lb(8).unwrap();
    let p = cut.profile("profile").unwrap();
    let d = Rule::Cut.apply(p).unwrap();
    let f = afs_factor(p, d.as_exact().unwrap()).unwrap().factor;
    assert!(f.value().unwrap() >= &q(3, 1));
    all_pass(&cut);

    let ues = gen_ues_lb(4).unwrap();
    assert_eq!(ues.profile("profile").unwrap().m(), 13);
    assert!(ues.expected.iter().any(|e| matches!(e, Expectation::AfsEquals { value, .. } if value == &q(16, 7))));
    all_pass(&ues);

    let fut = gen_fut_lb(6).unwrap();
    let d = Rule::Fut.apply(fut.profile("profile").unwrap()).unwrap();
    let y = fut.profile("profile").unwrap().candidate_index("y").unwrap();
    assert_eq!(d.as_exact().unwrap().share(y), &(q(2, 3) + q(1, 6)));
    all_pass(&fut);

    for n in [4, 6, 10, 12] {
        all_pass(&gen_cut_lb(n).unwrap());
    }
    for n in [9, 12] {
        all_pass(&gen_fut_lb(n).unwrap());
    }
    for n in [2, 3, 5] {
        all_pass(&gen_ues_lb(n).unwrap());
    }
    assert!(gen_cut_lb(7).is_err() && gen_fut_lb(8).is_err() && gen_ues_lb(1).is_err());
}

#[test]
fn map_afs_tight_closed_form() {
    let inst = gen_map_afs_tight(3).unwrap();
    let p = inst.profile("profile").unwrap();
    assert_eq!(p.n(), 9);
    let d = Rule::parse("map").unwrap().apply(p).unwrap();
    let shares: Vec<Q> = d.as_exact().unwrap().shares().to_vec();
    assert_eq!(shares, vec![q(4, 9), q(3, 9), q(2, 9), q(0, 1)]);
    all_pass(&inst);
    for l in [1, 5, 9] {
        all_pass(&gen_map_afs_tight(l).unwrap());
    }
}

#[test]
fn w0_first_payment() {
    let inst = gen_prop_lb_w0(2, 3).unwrap();
    let p = inst.profile("profile").unwrap();
    let third = Rule::Sequential(willingness_mps(q(1, 3)).unwrap());
    assert_eq!(third.apply(p).unwrap().as_exact().unwrap().share(0), &q(3, 4));
    let ues = gen_prop_lb_w0(2, 2).unwrap();
    let d = Rule::parse("ues").unwrap().apply(ues.profile("profile").unwrap()).unwrap();
    assert_eq!(d.as_exact().unwrap().share(0), &q(1, 2));
    for (t, l) in [(1, 2), (3, 4), (5, 2)] {
        all_pass(&gen_prop_lb_w0(t, l).unwrap());
    }
    assert!(gen_prop_lb_w0(2, 1).is_err());
}

#[test]
fn wz_processing_order() {
    for rule in ["mps:1/3", "map", "ues", "add13", "mps:2/3"] {
        let pi = PaymentWillingness::builtin(rule).unwrap();
        for (t, z, l) in [(2, 1, 2), (3, 1, 3), (3, 2, 2), (4, 3, 3)] {
            let inst = gen_prop_lb_wz(&pi, t, z, l, 240).unwrap();
            let p = inst.profile("profile").unwrap();
            let (_, trace) = run_sequential(p, &pi).unwrap();
            let x_pos = trace.order().iter().position(|&c| c == 0).unwrap();
            assert_eq!(x_pos as u64, z * l, "{rule} t={t} z={z} l={l}");
            all_pass(&inst);
        }
    }
}

#[test]
fn wz_grid_too_coarse() {
    let pi = PaymentWillingness::builtin("map").unwrap();
    let err = gen_prop_lb_wz(&pi, 3, 2, 4, 2).unwrap_err();
    assert!(matches!(err, Error::GridTooCoarse { denom: 2, .. }), "{err}");
    assert!(gen_prop_lb_wz(&pi, 2, 2, 2, 60).is_err());
}

#[test]
fn fixed_instances_reproduce() {
    for inst in [
        gen_map_example(),
        gen_spc_impossibility(),
        gen_cut_wpc(),
        gen_fut_wpc(),
        gen_map_strategyproofness(),
    ] {
        all_pass(&inst);
    }
    assert_eq!(gen_spc_impossibility().profile("full").unwrap().n(), 4);
}

#[test]
fn nash_instances_reproduce() {
    all_pass(&gen_nash_rpc());
    all_pass(&gen_nash_rpc_large());
}

#[test]
fn files_round_trip() {
    let dir = std::env::temp_dir().join(format!("corpus-rt-{}", std::process::id()));
    let inst = gen_nash_rpc();
    let written = inst.write_files(&dir).unwrap();
    assert_eq!(written.len(), 4);
    let a = std::fs::read_to_string(dir.join("nash_rpc_a.profile")).unwrap();
    assert_eq!(&parse_profile_text(&a).unwrap(), inst.profile("a").unwrap());
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("nash_rpc.expected.json")).unwrap()).unwrap();
    assert_eq!(sidecar["profiles"]["a"], "nash_rpc_a.profile");
    assert_eq!(sidecar["expected"].as_array().unwrap().len(), inst.expected.len());
    std::fs::remove_dir_all(&dir).unwrap();

    let single = gen_cut_lb(8).unwrap();
    assert_eq!(single.file_name("profile"), "cut_lb.profile");
    let emitted = emit("map_core_family", &parse_params(&["k=3"]).unwrap()).unwrap();
    assert!(matches!(emitted, Generated::Instance(_)));
    assert!(emit("map_core_family", &BTreeMap::new()).is_ok());
}
