use std::time::Instant;

use budget_core::classic::{run_cut, run_fut, run_nash, verify_nash, NashSolverConfig};
use budget_core::model::{q, ApprovalProfile, ExactDistribution};
use budget_core::seqpay::{decomposition_from_trace, run_sequential, willingness_map};

fn profile(candidates: &[&str], rows: &[(u64, &[&str])]) -> ApprovalProfile {
    ApprovalProfile::from_names(candidates, rows).unwrap()
}

fn nash_a() -> ApprovalProfile {
    profile(
        &["a", "b", "c"],
        &[(3, &["a"]), (2, &["b", "c"]), (2, &["c"]), (3, &["a", "b"])],
    )
}

fn nash_a_prime() -> ApprovalProfile {
    profile(
        &["a", "b", "c"],
        &[(1, &["a"]), (1, &["b"]), (1, &["c"]), (2, &["a", "b"]), (4, &["a", "c"])],
    )
}

fn nash_large_pair() -> (ApprovalProfile, ApprovalProfile) {
    let c = ["a", "b", "c"];
    (
        profile(&c, &[(50, &["a"]), (49, &["b", "c"]), (49, &["c"]), (50, &["a", "b"])]),
        profile(&c, &[(1, &["a"]), (1, &["c"]), (200, &["a", "b"])]),
    )
}

fn close(actual: &[f64], expected: &[f64], tol: f64) -> bool {
    actual.iter().zip(expected).all(|(a, e)| (a - e).abs() <= tol)
}

#[test]
fn nash_examples() {
    let start = Instant::now();
    let cfg = NashSolverConfig::default();
    let (big_a, big_b) = nash_large_pair();
    let cases = [
        (nash_a(), vec![0.6, 0.0, 0.4], 1e-4),
        (nash_a_prime(), vec![0.608, 0.157, 0.235], 2e-3),
        (big_a.combine(&big_b).unwrap(), vec![153.0 / 300.0, 97.0 / 300.0, 50.0 / 300.0], 1e-4),
        (big_a, vec![100.0 / 198.0, 0.0, 98.0 / 198.0], 1e-4),
    ];
    for (p, expected, tol) in cases {
        let out = run_nash(&p, &cfg).unwrap();
        let s = out.distribution.shares();
        assert!(close(s, &expected, tol), "{s:?} vs {expected:?}");
        assert!(verify_nash(&p, &out.distribution, 1e-6).ok);
    }
    assert!(start.elapsed().as_secs() < 10);
}

#[test]
fn nash_combined_small_pair() {
    let p = nash_a().combine(&nash_a_prime()).unwrap();
    let out = run_nash(&p, &NashSolverConfig::default()).unwrap();
    assert!(verify_nash(&p, &out.distribution, 1e-6).ok);
    let s = out.distribution.shares();
    assert!(s[1] > 0.1 && s[0] > s[2] && s[2] > s[1]);
}

#[test]
fn cut_wpc_pair() {
    let c = ["a", "b", "c"];
    let a = profile(&c, &[(2, &["a"]), (4, &["a", "c"]), (1, &["c"]), (3, &["b"])]);
    let b = profile(&c, &[(6, &["a"]), (2, &["b"]), (1, &["b", "c"]), (1, &["c"])]);
    let (da, _) = run_cut(&a);
    let (db, _) = run_cut(&b);
    assert_eq!(da, db);
    let (dab, dec) = run_cut(&a.combine(&b).unwrap());
    assert_eq!(dab.share(2), &q(3, 20));
    assert_eq!(dec.aggregate(&a.combine(&b).unwrap()), dab);
}

#[test]
fn fut_wpc_pair() {
    let c = ["a", "b", "c"];
    let a = profile(
        &c,
        &[(3, &["a"]), (5, &["a", "c"]), (1, &["c"]), (1, &["b", "c"]), (4, &["b"])],
    );
    let b = profile(&c, &[(6, &["a"]), (2, &["a", "b"]), (4, &["b"]), (2, &["c"])]);
    let (da, _, _) = run_fut(&a);
    let (db, _, _) = run_fut(&b);
    assert_eq!(da.shares(), &[q(8, 14), q(4, 14), q(2, 14)]);
    assert_eq!(da, db);
    let (dab, _, events) = run_fut(&a.combine(&b).unwrap());
    assert_eq!(dab.share(1), &q(9, 28));
    assert!(events.windows(2).all(|w| w[0].lambda <= w[1].lambda));
}

#[test]
fn map_strategyproofness_instance() {
    let c = ["b", "a", "c", "d"];
    let truthful = profile(
        &c,
        &[(1, &["a", "b", "c"]), (2, &["a", "b"]), (2, &["a", "c"]), (1, &["b", "d"]), (1, &["c", "d"])],
    );
    let manipulated = profile(
        &c,
        &[(1, &["b", "c"]), (2, &["a", "b"]), (2, &["a", "c"]), (1, &["b", "d"]), (1, &["c", "d"])],
    );
    let (t, trace) = run_sequential(&truthful, &willingness_map()).unwrap();
    let (m, _) = run_sequential(&manipulated, &willingness_map()).unwrap();
    assert_eq!(t.shares(), &[q(0, 1), q(5, 7), q(0, 1), q(2, 7)]);
    assert_eq!(m.shares(), &[q(4, 7), q(0, 1), q(3, 7), q(0, 1)]);
    let dec = decomposition_from_trace(&trace, &truthful).unwrap();
    assert_eq!(dec.aggregate(&truthful), t);
    assert_ne!(t, ExactDistribution::point(4, 1));
}
