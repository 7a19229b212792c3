use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::model::{q, render_q, ApprovalBallot, ApprovalProfile, Group, Q};
use crate::seqpay::PaymentWillingness;

use super::instance::{Expectation, NamedInstance};

fn profile(candidates: Vec<String>, rows: Vec<(u64, Vec<usize>)>) -> ApprovalProfile {
    let groups = rows
        .into_iter()
        .map(|(count, ids)| Group {
            ballot: ApprovalBallot::new(ids).expect("nonempty ballot"),
            count,
        })
        .collect();
    ApprovalProfile::new(candidates, groups).expect("generated profile")
}

fn precondition(msg: String) -> Error {
    Error::Precondition(msg)
}

fn qn(num: u64, den: u64) -> Q {
    q(num as i64, den as i64)
}

fn shares(rule: &str, s: Vec<(String, Q)>) -> Expectation {
    Expectation::Shares {
        rule: rule.into(),
        profile: "profile".into(),
        shares: s,
    }
}

fn afs_at_least(rule: &str, bound: Q) -> Expectation {
    Expectation::AfsAtLeast {
        rule: rule.into(),
        profile: "profile".into(),
        bound,
    }
}

fn core_at_least(rule: &str, bound: Q) -> Expectation {
    Expectation::CoreAtLeast {
        rule: rule.into(),
        profile: "profile".into(),
        bound,
    }
}

/// CUT lower-bound family; `n` even and at least 4.
///
/// Candidates `x*, x1..x{n/2}`. Voters `1..n/2-1` approve `{x_i, x_{n/2}}`,
/// voters `n/2..n-2` approve `x*` and `x1..x{n/2-1}`, and two voters approve `x*`.
pub fn gen_cut_lb(n: u64) -> Result<NamedInstance> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(precondition(format!("cut_lb needs an even n ≥ 4, got {n}")));
    }
    let h = (n / 2) as usize;
    let mut cands = vec!["x*".to_string()];
    cands.extend((1..=h).map(|i| format!("x{i}")));
    let mut rows: Vec<(u64, Vec<usize>)> = (1..h).map(|i| (1, vec![i, h])).collect();
    let mut wide = vec![0];
    wide.extend(1..h);
    rows.push((h as u64 - 1, wide));
    rows.push((2, vec![0]));
    let bound = qn(n / 2 - 1, 1);
    Ok(NamedInstance::new("cut_lb", "CUT is only an n/2-1 approximation of AFS and core")
        .param("n", n)
        .with_profile("profile", profile(cands, rows))
        .expect(shares(
            "cut",
            vec![("x*".into(), q(1, 2) + qn(1, n)), (format!("x{h}"), q(0, 1))],
        ))
        .expect(afs_at_least("cut", bound.clone()))
        .expect(core_at_least("cut", bound)))
}

/// FUT lower-bound family; `n` divisible by 3 and at least 6.
///
/// Candidates `x*, x1..x{n/3-1}, y`. Voter `i < n/3` approves `{x*, x_i}`,
/// two voters approve `y`, the rest approve `x1..x{n/3-1}` and `y`.
pub fn gen_fut_lb(n: u64) -> Result<NamedInstance> {
    if n < 6 || !n.is_multiple_of(3) {
        return Err(precondition(format!("fut_lb needs n ≥ 6 divisible by 3, got {n}")));
    }
    let s = (n / 3 - 1) as usize;
    let y = s + 1;
    let mut cands = vec!["x*".to_string()];
    cands.extend((1..=s).map(|i| format!("x{i}")));
    cands.push("y".into());
    let mut rows: Vec<(u64, Vec<usize>)> = (1..=s).map(|i| (1, vec![0, i])).collect();
    rows.push((2, vec![y]));
    let mut wide: Vec<usize> = (1..=s).collect();
    wide.push(y);
    rows.push((n - s as u64 - 2, wide));
    let bound = qn(n / 3 - 1, 1);
    Ok(NamedInstance::new("fut_lb", "FUT is only an n/3-1 approximation of AFS and core")
        .param("n", n)
        .with_profile("profile", profile(cands, rows))
        .expect(shares(
            "fut",
            vec![("y".into(), q(2, 3) + qn(1, n)), ("x*".into(), q(0, 1))],
        ))
        .expect(afs_at_least("fut", bound.clone()))
        .expect(core_at_least("fut", bound)))
}

/// UES lower-bound family: `n` voters share `x*` and nothing else, each
/// approving `n-1` private candidates.
pub fn gen_ues_lb(n: u64) -> Result<NamedInstance> {
    if n < 2 {
        return Err(precondition(format!("ues_lb needs n ≥ 2, got {n}")));
    }
    let mut cands = vec!["x*".to_string()];
    let mut rows = Vec::new();
    for i in 1..=n {
        let mut ballot = vec![0];
        for j in 1..n {
            ballot.push(cands.len());
            cands.push(format!("x{i}_{j}"));
        }
        rows.push((1, ballot));
    }
    let value = qn(n * n, 2 * n - 1);
    Ok(NamedInstance::new("ues_lb", "UES is only an n²/(2n-1) approximation of AFS and core")
        .param("n", n)
        .with_profile("profile", profile(cands, rows))
        .expect(Expectation::AfsEquals {
            rule: "ues".into(),
            profile: "profile".into(),
            value: value.clone(),
        })
        .expect(core_at_least("ues", value)))
}

/// Profile on which MAP's AFS factor is `max(1, 2ℓ/(ℓ+3))`.
///
/// Candidates `x1..xℓ, x*`; for each `i` one voter approves `{x_i, x*}` and
/// `ℓ+1-i` voters approve `x_i`.
pub fn gen_map_afs_tight(l: u64) -> Result<NamedInstance> {
    if l < 1 {
        return Err(precondition("map_afs_tight needs ℓ ≥ 1".into()));
    }
    let lu = l as usize;
    let mut cands: Vec<String> = (1..=lu).map(|i| format!("x{i}")).collect();
    cands.push("x*".into());
    let mut rows = Vec::new();
    for i in 0..lu {
        rows.push((1, vec![i, lu]));
        rows.push((l - i as u64, vec![i]));
    }
    let n = l + l * (l + 1) / 2;
    let mut expected: Vec<(String, Q)> = (1..=l).map(|i| (format!("x{i}"), qn(l + 2 - i, n))).collect();
    expected.push(("x*".into(), q(0, 1)));
    let s_ballots = (1..=lu).map(|i| vec![format!("x{i}"), "x*".into()]).collect();
    Ok(NamedInstance::new("map_afs_tight", "MAP's AFS factor approaches 2")
        .param("l", l)
        .with_profile("profile", profile(cands, rows))
        .expect(shares("map", expected))
        .expect(Expectation::Utility {
            rule: "map".into(),
            profile: "profile".into(),
            ballots: s_ballots,
            value: q(1, 1),
        })
        .expect(Expectation::AfsEquals {
            rule: "map".into(),
            profile: "profile".into(),
            value: qn(2 * l, l + 3).max(q(1, 1)),
        }))
}

/// Profiles on which MAP is only a `k/2` approximation of the core.
///
/// Voters are `(i, j)` for rows `i ≤ k` and columns `j ≤ 2^{k-1}`. Voter
/// `(i, j)` approves `y{i}_{⌈j/2^{k-i}⌉}`; row `k` also approves `x{j}`, and
/// row `i < k` approves the `b`-th block of `2^{k-i-1}` consecutive `x`s
/// containing column `j`. All `y` candidates precede the `x` candidates.
pub fn gen_map_core_family(k: u32) -> Result<NamedInstance> {
    if !(2..=20).contains(&k) {
        return Err(precondition(format!("map_core_family needs 2 ≤ k ≤ 20, got {k}")));
    }
    let cols = 1usize << (k - 1);
    let mut cands = Vec::new();
    let mut y_index = vec![Vec::new(); k as usize + 1];
    for i in 1..=k as usize {
        for l in 1..=(1usize << (i - 1)) {
            y_index[i].push(cands.len());
            cands.push(format!("y{i}_{l}"));
        }
    }
    let x0 = cands.len();
    cands.extend((1..=cols).map(|j| format!("x{j}")));
    let mut rows = Vec::new();
    for i in 1..=k as usize {
        for j in 1..=cols {
            let l = j.div_ceil(1usize << (k as usize - i));
            let mut ballot = vec![y_index[i][l - 1]];
            if i == k as usize {
                ballot.push(x0 + j - 1);
            } else {
                let s = 1usize << (k as usize - i - 1);
                let b = j.div_ceil(s);
                ballot.extend(((b - 1) * s..b * s).map(|c| x0 + c));
            }
            rows.push((1, ballot));
        }
    }
    let mut expected = Vec::new();
    for i in 1..=k as u64 {
        for l in 1..=(1u64 << (i - 1)) {
            expected.push((format!("y{i}_{l}"), qn(1, k as u64 * (1 << (i - 1)))));
        }
    }
    expected.extend((1..=cols).map(|j| (format!("x{j}"), q(0, 1))));
    let p = profile(cands, rows);
    let small = p.n() as usize <= crate::oracle::CORE_LIMIT;
    let mut inst = NamedInstance::new("map_core_family", "MAP is only a k/2 approximation of the core")
        .param("k", k)
        .with_profile("profile", p)
        .expect(shares("map", expected))
        .expect(Expectation::DeviationAtLeast {
            rule: "map".into(),
            profile: "profile".into(),
            toward: (1..=cols).map(|j| format!("x{j}")).collect(),
            bound: q(k as i64, 2),
        });
    if small {
        inst = inst.expect(core_at_least("map", q(k as i64, 2)));
    }
    Ok(inst)
}

fn w_candidates(t: usize, l: usize) -> Vec<String> {
    let mut cands = vec!["x*".to_string()];
    for i in 1..=l {
        cands.extend((1..t).map(|j| format!("y{i}_{j}")));
    }
    cands
}

/// Index of `y{i}_{j}` in [`w_candidates`].
fn w_index(t: usize, i: usize, j: usize) -> usize {
    1 + (i - 1) * (t - 1) + (j - 1)
}

fn w_ballots(t: usize, l: usize, count: u64) -> Vec<(u64, Vec<usize>)> {
    (1..=l)
        .map(|i| {
            let mut b = vec![0];
            b.extend((1..t).map(|j| w_index(t, i, j)));
            (count, b)
        })
        .collect()
}

/// `ℓ` ballots `{x*, y{i}_1..y{i}_{t-1}}` overlapping only in `x*`.
pub fn gen_prop_lb_w0(t: u64, l: u64) -> Result<NamedInstance> {
    if t < 1 || l < 2 {
        return Err(precondition(format!("prop_lb_w0 needs t ≥ 1 and ℓ ≥ 2, got t={t}, ℓ={l}")));
    }
    let (tu, lu) = (t as usize, l as usize);
    let mut inst = NamedInstance::new("prop_lb_w0", "a sequential rule gives x* exactly its first payment")
        .param("t", t)
        .param("l", l)
        .with_profile("profile", profile(w_candidates(tu, lu), w_ballots(tu, lu, 1)));
    for rule in ["map", "ues", "mps:1/3", "add13"] {
        let pi = PaymentWillingness::builtin(rule)?;
        inst = inst.expect(shares(rule, vec![("x*".into(), pi.pi(tu, 1))]));
    }
    Ok(inst)
}

/// `K(u, v) = (ℓ - v)·π(t, u) + v·π(t, u+1)`.
fn k_value(pi: &PaymentWillingness, t: usize, l: usize, u: usize, v: usize) -> Q {
    Q::from_integer(((l - v) as i64).into()) * pi.pi(t, u) + Q::from_integer((v as i64).into()) * pi.pi(t, u + 1)
}

/// `W⁰` plus `K^ε(u, v-1)` voters approving only `y{v}_{u}` for `u ≤ z`.
///
/// `K^ε` takes, in reverse lexicographic order of `(u, v)`, the smallest
/// multiple of `1/denom` above both `K(u, v)` and the previously assigned
/// value, with `ε = 1/ℓ`. The profile is then scaled by `denom` and reduced.
pub fn gen_prop_lb_wz(pi: &PaymentWillingness, t: u64, z: u64, l: u64, denom: u64) -> Result<NamedInstance> {
    if t < 2 || l < 2 || z < 1 || z >= t || denom < 1 {
        return Err(precondition(format!(
            "prop_lb_wz needs t ≥ 2, ℓ ≥ 2, 1 ≤ z < t and denom ≥ 1, got t={t}, z={z}, ℓ={l}, denom={denom}"
        )));
    }
    let (tu, zu, lu) = (t as usize, z as usize, l as usize);
    pi.check_covers(tu)?;
    let eps = qn(1, l);
    let grid = Q::from_integer((denom as i64).into());
    // numerators over `denom`, indexed [u - 1][v]
    let mut kg = vec![vec![0u64; lu]; zu];
    let mut prev: Option<Q> = None;
    for u in (1..=zu).rev() {
        for v in (0..lu).rev() {
            let k = k_value(pi, tu, lu, u, v);
            let floor = match &prev {
                Some(p) if p > &k => p.clone(),
                _ => k.clone(),
            };
            let g: num_bigint::BigInt = (floor * &grid).floor().to_integer() + 1;
            let value = Q::from_integer(g.clone()) / &grid;
            if value > k.clone() + &eps {
                return Err(Error::GridTooCoarse {
                    denom,
                    reason: format!("no grid point in ({}, {}]", render_q(&k), render_q(&(k.clone() + &eps))),
                });
            }
            kg[u - 1][v] = g.to_u64().ok_or_else(|| precondition("filler count overflow".into()))?;
            prev = Some(value);
        }
    }
    let mut rows = w_ballots(tu, lu, denom);
    for (u, row) in kg.iter().enumerate() {
        for v in 1..=lu {
            rows.push((row[v - 1], vec![w_index(tu, v, u + 1)]));
        }
    }
    let g = rows.iter().fold(0u64, |acc, (c, _)| acc.gcd(c));
    for r in &mut rows {
        r.0 /= g;
    }
    let mut prefix = Vec::new();
    for u in 1..=zu {
        prefix.extend((1..=lu).map(|v| format!("y{v}_{u}")));
    }
    prefix.push("x*".into());
    let mut inst = NamedInstance::new("prop_lb_wz", "fillers make every y with position at most z precede x*")
        .param("rule", pi.name())
        .param("t", t)
        .param("z", z)
        .param("l", l)
        .param("denom", denom)
        .with_profile("profile", profile(w_candidates(tu, lu), rows))
        .expect(Expectation::Order {
            rule: pi.name().into(),
            profile: "profile".into(),
            prefix,
        });
    inst.willingness = Some(pi.clone());
    Ok(inst)
}
