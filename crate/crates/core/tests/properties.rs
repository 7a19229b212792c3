use budget_core::classic::{run_cut, run_fut, run_nash, verify_nash, NashSolverConfig};
use budget_core::consistency::{check_rpc_pair, check_spc_pair, check_wpc_pair, CheckOptions, Status};
use budget_core::fairness::{afs_factor, core_exact, core_lower_single, decompose, pf_score};
use budget_core::model::{ApprovalProfile, ExactDistribution, Q};
use budget_core::oracle::{enumerate_afs, enumerate_core, enumerate_core_voters, Deviations};
use budget_core::seqpay::{decomposition_from_trace, run_sequential, PaymentWillingness};
use budget_core::Rule;
use num_traits::{One, Zero};
use proptest::prelude::*;

const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];
const EXACT_RULES: [&str; 7] = ["map", "ues", "mps:1/3", "mps:1/2", "add13", "cut", "fut"];
const SEQUENTIAL: [&str; 5] = ["map", "ues", "mps:1/3", "mps:3/4", "add13"];

fn build(m: usize, rows: &[(u64, u32)]) -> ApprovalProfile {
    let ballots: Vec<(u64, Vec<&str>)> = rows
        .iter()
        .map(|&(count, mask)| (count, (0..m).filter(|j| mask >> j & 1 == 1).map(|j| NAMES[j]).collect()))
        .collect();
    let rows: Vec<(u64, &[&str])> = ballots.iter().map(|(c, b)| (*c, b.as_slice())).collect();
    ApprovalProfile::from_names(&NAMES[..m], &rows).unwrap()
}

fn rows(m: usize, max_groups: usize, max_count: u64) -> impl Strategy<Value = Vec<(u64, u32)>> {
    prop::collection::vec((1..=max_count, 1u32..(1 << m)), 1..=max_groups)
}

/// A profile with `m` candidates and at most `max_voters` voters.
fn profile(max_voters: u64) -> impl Strategy<Value = ApprovalProfile> {
    (2usize..=5).prop_flat_map(move |m| {
        rows(m, 6, 3).prop_filter_map("too many voters", move |r| {
            let p = build(m, &r);
            (p.n() <= max_voters).then_some(p)
        })
    })
}

fn pair() -> impl Strategy<Value = (ApprovalProfile, ApprovalProfile)> {
    (2usize..=4).prop_flat_map(|m| (rows(m, 4, 3), rows(m, 4, 3)).prop_map(move |(a, b)| (build(m, &a), build(m, &b))))
}

fn exact(rule: &str, p: &ApprovalProfile) -> ExactDistribution {
    Rule::parse(rule).unwrap().apply(p).unwrap().as_exact().unwrap().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn combine_adds_electorates((a, b) in pair()) {
        let ab = a.combine(&b).unwrap();
        prop_assert_eq!(ab.n(), a.n() + b.n());
        let ba = b.combine(&a).unwrap();
        for x in 0..a.m() {
            prop_assert_eq!(ab.approval_score(x), a.approval_score(x) + b.approval_score(x));
            prop_assert_eq!(ab.approval_score(x), ba.approval_score(x));
        }
    }

    #[test]
    fn outputs_are_distributions(p in profile(18)) {
        for rule in EXACT_RULES {
            let d = exact(rule, &p);
            let total: Q = d.shares().iter().sum();
            prop_assert!(total.is_one(), "{} sums to {}", rule, total);
            for x in 0..p.m() {
                prop_assert!(d.share(x) >= &Q::zero());
                if p.approval_score(x) == 0 {
                    prop_assert!(d.share(x).is_zero(), "{} funds unapproved candidate", rule);
                }
            }
        }
    }

    #[test]
    fn scale_invariance(p in profile(12), k in 2u64..=4) {
        for rule in EXACT_RULES {
            prop_assert_eq!(exact(rule, &p), exact(rule, &p.scaled(k)), "{}", rule);
        }
        let cfg = NashSolverConfig::default();
        let a = run_nash(&p, &cfg).unwrap().distribution;
        let b = run_nash(&p.scaled(k), &cfg).unwrap().distribution;
        for (x, y) in a.shares().iter().zip(b.shares()) {
            prop_assert!((x - y).abs() < 1e-5);
        }
    }

    #[test]
    fn trace_decompositions_reconstruct(p in profile(18)) {
        for rule in SEQUENTIAL {
            let pi = PaymentWillingness::builtin(rule).unwrap();
            let (d, trace) = run_sequential(&p, &pi).unwrap();
            let dec = decomposition_from_trace(&trace, &p).unwrap();
            prop_assert_eq!(&dec.aggregate(&p), &d, "{}", rule);
            prop_assert!(decompose(&p, &d).is_feasible());
        }
        let (d, dec) = run_cut(&p);
        prop_assert_eq!(dec.aggregate(&p), d);
        let (d, dec, _) = run_fut(&p);
        prop_assert_eq!(dec.aggregate(&p), d);
    }

    #[test]
    fn ranking_partitions_by_share(p in profile(18), rule in prop::sample::select(EXACT_RULES.to_vec())) {
        let d = exact(rule, &p);
        let r = d.ranking(0.0);
        let mut seen: Vec<usize> = r.classes.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..p.m()).collect::<Vec<_>>());
        for class in &r.classes {
            prop_assert!(class.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(class.iter().all(|&x| d.share(x) == d.share(class[0])));
        }
        for w in r.classes.windows(2) {
            prop_assert!(d.share(w[0][0]) > d.share(w[1][0]));
        }
    }

    #[test]
    fn afs_matches_enumeration(p in profile(12), rule in prop::sample::select(EXACT_RULES.to_vec())) {
        let d = exact(rule, &p);
        let fast = afs_factor(&p, &d).unwrap().factor;
        let slow = enumerate_afs(&p, &d, 20).unwrap().factor;
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn core_matches_enumeration(p in profile(8), rule in prop::sample::select(EXACT_RULES.to_vec())) {
        let d = exact(rule, &p);
        let core = core_exact(&p, &d, 14).unwrap().factor;
        prop_assert_eq!(&core, &enumerate_core(&p, &d, 14, Deviations::All).unwrap().factor);
        prop_assert_eq!(&core, &enumerate_core_voters(&p, &d, 14).unwrap());
        let lower = core_lower_single(&p, &d).unwrap().factor;
        let pf = pf_score(&p, &d).unwrap().factor;
        prop_assert!(lower.cmp_tol(&core, 0.0).is_le() && core.cmp_tol(&pf, 0.0).is_le());
    }

    #[test]
    fn nash_output_verifies(p in profile(18)) {
        let out = run_nash(&p, &NashSolverConfig::default()).unwrap();
        prop_assert!(verify_nash(&p, &out.distribution, 1e-6).ok);
        prop_assert!(decompose(&p, &out.distribution).is_feasible());
    }

    #[test]
    fn consistency_axioms_nest((a, b) in pair(), rule in prop::sample::select(EXACT_RULES.to_vec())) {
        let rule = Rule::parse(rule).unwrap();
        let opts = CheckOptions::default();
        let spc = check_spc_pair(&rule, &a, &b, &opts).unwrap().status;
        let rpc = check_rpc_pair(&rule, &a, &b, &opts).unwrap().status;
        let wpc = check_wpc_pair(&rule, &a, &b, &opts).unwrap().status;
        if spc == Status::Holds {
            prop_assert_eq!(rpc, Status::Holds);
        }
        if rpc == Status::Holds {
            prop_assert_eq!(wpc, Status::Holds);
        }
    }
}
