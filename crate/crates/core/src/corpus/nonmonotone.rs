use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{ApprovalBallot, ApprovalProfile, Group, Q};
use crate::seqpay::{run_sequential, PaymentWillingness};

use super::instance::{Expectation, NamedInstance};

const SEARCH_LIMIT: usize = 32;
const FILLER_RETRIES: u64 = 256;

/// Outcome of [`gen_nonmonotone`].
#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Instance(Box<NamedInstance>),
    /// The willingness function is MAP or UES on every ballot size searched.
    NotApplicable(String),
}

/// Parameters of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NonmonotoneParams {
    pub l1: usize,
    pub l2: usize,
    pub k: usize,
    pub t1: u64,
    pub t2: u64,
    pub t3: u64,
    pub n_x: u64,
    pub n_y: u64,
    pub n_z: u64,
}

/// Smallest integer `t` with `t·delta > rhs`.
fn smallest_above(rhs: &Q, delta: &Q) -> u64 {
    let t = (rhs / delta).floor() + Q::one();
    t.to_integer().to_u64().expect("small count")
}

fn ceil_nonneg(v: Q) -> u64 {
    if v <= Q::zero() {
        0
    } else {
        v.ceil().to_integer().to_u64().expect("small count")
    }
}

fn witnesses(pi: &PaymentWillingness) -> (Option<usize>, Option<(usize, usize)>) {
    let limit = pi.max_ballot_size().unwrap_or(SEARCH_LIMIT);
    let l1 = (1..limit).find(|&t| pi.pi(t + 1, 1) < Q::one());
    let l2k = (2..=limit).find_map(|t| (1..t).find(|&k| pi.pi(t, k) > pi.pi(t, k + 1)).map(|k| (t, k)));
    (l1, l2k)
}

struct Layout {
    cands: Vec<String>,
    b: Vec<usize>,
    d: Vec<usize>,
    x: usize,
    y: usize,
    z: usize,
}

fn layout(l: usize) -> Layout {
    let mut cands: Vec<String> = (1..l).map(|i| format!("b{i}")).collect();
    let b: Vec<usize> = (0..l - 1).collect();
    let x = cands.len();
    cands.extend(["x".to_string(), "y".into(), "z".into()]);
    let d0 = cands.len();
    cands.extend((1..l).map(|i| format!("d{i}")));
    Layout {
        cands,
        b,
        d: (d0..d0 + l - 1).collect(),
        x,
        y: x + 1,
        z: x + 2,
    }
}

fn build(lay: &Layout, p: &NonmonotoneParams) -> (ApprovalProfile, ApprovalBallot) {
    let shared: Vec<usize> = lay.b[..p.k - 1]
        .iter()
        .chain(&lay.d[..p.l2 - p.k - 1])
        .copied()
        .collect();
    let mut n1: Vec<usize> = lay.d[..p.l1 - 1].to_vec();
    n1.push(lay.y);
    let n1 = ApprovalBallot::new(n1).expect("nonempty");
    let with = |extra: [usize; 2]| ApprovalBallot::new(shared.iter().copied().chain(extra)).expect("nonempty");
    let mut groups = vec![
        Group { ballot: n1.clone(), count: p.t1 },
        Group { ballot: with([lay.x, lay.z]), count: p.t2 },
        Group { ballot: with([lay.y, lay.z]), count: p.t3 },
        Group { ballot: ApprovalBallot::new([lay.x]).expect("nonempty"), count: p.n_x },
        Group { ballot: ApprovalBallot::new([lay.y]).expect("nonempty"), count: p.n_y },
        Group { ballot: ApprovalBallot::new([lay.z]).expect("nonempty"), count: p.n_z },
    ];
    let total: u64 = groups.iter().map(|g| g.count).sum();
    for &b in &lay.b[..p.k - 1] {
        groups.push(Group {
            ballot: ApprovalBallot::new([b]).expect("nonempty"),
            count: 2 * total,
        });
    }
    let profile = ApprovalProfile::new(lay.cands.clone(), groups).expect("generated profile");
    (profile, n1)
}

/// `t1` voters with the `N1` ballot additionally approve `x`. Fillers may
/// share that ballot, so only `t1` of the merged group move.
fn all_add_x(profile: &ApprovalProfile, n1: &ApprovalBallot, t1: u64, x: usize) -> ApprovalProfile {
    let mut groups: Vec<Group> = profile.groups().to_vec();
    let g = groups.iter_mut().find(|g| &g.ballot == n1).expect("N1 group");
    g.count -= t1;
    groups.push(Group {
        ballot: n1.with(x),
        count: t1,
    });
    groups.retain(|g| g.count > 0);
    ApprovalProfile::new(profile.candidates().to_vec(), groups).expect("generated profile")
}

fn starts_with(order: &[usize], prefix: &[usize]) -> bool {
    order.len() >= prefix.len() && order[..prefix.len()] == prefix[..]
}

/// A profile on which adding `x` to a few ballots lowers `x`'s share.
///
/// `N1` voters approve `d1..d{ℓ1-1}` and `y`; `t2` voters approve
/// `b1..b{k-1}`, `d1..d{ℓ2-k-1}`, `x` and `z`; `t3` voters the same with `y`
/// in place of `x`; singleton fillers approve `x`, `y` or `z`, and each used
/// `b` gets enough singleton voters to be funded first. `t1`, `t2`, `t3` are
/// the smallest integers meeting their inequalities; filler counts grow until
/// the trace funds `y` then `x` before, and `z` first after `N1` adds `x`.
pub fn gen_nonmonotone(pi: &PaymentWillingness) -> Result<Generated> {
    let (l1, l2k) = witnesses(pi);
    let Some(l1) = l1 else {
        return Ok(Generated::NotApplicable(format!("{} pays its full budget to the first candidate", pi.name())));
    };
    let Some((l2, k)) = l2k else {
        return Ok(Generated::NotApplicable(format!("{} splits every budget evenly", pi.name())));
    };
    let l = l1.max(l2);
    let p1 = pi.pi(l1 + 1, 1);
    let delta1 = Q::one() - &p1;
    let c = pi.pi(l2, k);
    let delta2 = c.clone() - pi.pi(l2, k + 1);
    let t1 = smallest_above(&Q::one(), &delta1);
    let t1q = Q::from_integer((t1 as i64).into());
    let t2 = smallest_above(&(t1q.clone() * &p1), &delta2);
    let t3 = smallest_above(&(t1q.clone() * &p1 + Q::one()), &delta2);
    let floor = t1 + t2 + t3;
    let (t2q, t3q) = (Q::from_integer((t2 as i64).into()), Q::from_integer((t3 as i64).into()));

    let lay = layout(l);
    let mut n_z = floor;
    for _ in 0..FILLER_RETRIES {
        let pz = (t2q.clone() + &t3q) * &c + Q::from_integer((n_z as i64).into());
        let n_y = (pz.clone() - &t1q - t3q.clone() * &c).floor().to_integer().to_i64().unwrap_or(0) + 1;
        let n_x = ceil_nonneg(pz - t1q.clone() * &p1 - Q::one() - t2q.clone() * &c);
        if n_y < floor as i64 || n_x < floor {
            n_z += 1;
            continue;
        }
        let params = NonmonotoneParams {
            l1,
            l2,
            k,
            t1,
            t2,
            t3,
            n_x,
            n_y: n_y as u64,
            n_z,
        };
        if let Some(inst) = try_instance(pi, &lay, &params)? {
            return Ok(Generated::Instance(Box::new(inst)));
        }
        n_z += 1;
    }
    Err(Error::Precondition(format!(
        "no filler counts up to {n_z} realize the intended selection order for {}",
        pi.name()
    )))
}

fn try_instance(pi: &PaymentWillingness, lay: &Layout, params: &NonmonotoneParams) -> Result<Option<NamedInstance>> {
    let (before, n1) = build(lay, params);
    let after = all_add_x(&before, &n1, params.t1, lay.x);
    let (d_before, tr_before) = run_sequential(&before, pi)?;
    let (d_after, tr_after) = run_sequential(&after, pi)?;
    let b = &lay.b[..params.k - 1];
    let want_before: Vec<usize> = b.iter().copied().chain([lay.y, lay.x]).collect();
    let want_after: Vec<usize> = b.iter().copied().chain([lay.z]).collect();
    if !starts_with(&tr_before.order(), &want_before)
        || !starts_with(&tr_after.order(), &want_after)
        || d_after.share(lay.x) >= d_before.share(lay.x)
    {
        return Ok(None);
    }
    // walk one voter at a time to a single violating step
    let mut current = before.clone();
    let mut share = d_before.share(lay.x).clone();
    let mut step = None;
    for _ in 0..params.t1 {
        let g = current
            .groups()
            .iter()
            .position(|g| g.ballot == n1)
            .expect("an N1 voter remains");
        let next = current.with_added_approval(g, lay.x)?;
        let (d_next, _) = run_sequential(&next, pi)?;
        if d_next.share(lay.x) < &share {
            step = Some((current.clone(), g));
            break;
        }
        share = d_next.share(lay.x).clone();
        current = next;
    }
    let (step_profile, group) = step.expect("the total change is a decrease");
    let rule = pi.name().to_string();
    let name = |x: usize| before.name(x).to_string();
    let mut inst = NamedInstance::new("nonmonotone", "a sequential rule other than MAP and UES fails monotonicity")
        .param("rule", pi.name())
        .param("l1", params.l1)
        .param("l2", params.l2)
        .param("k", params.k)
        .param("t1", params.t1)
        .param("t2", params.t2)
        .param("t3", params.t3)
        .param("n_x", params.n_x)
        .param("n_y", params.n_y)
        .param("n_z", params.n_z)
        .with_profile("before", before.clone())
        .with_profile("after", after)
        .with_profile("step", step_profile)
        .expect(Expectation::Order {
            rule: rule.clone(),
            profile: "before".into(),
            prefix: want_before.iter().map(|&x| name(x)).collect(),
        })
        .expect(Expectation::Order {
            rule: rule.clone(),
            profile: "after".into(),
            prefix: want_after.iter().map(|&x| name(x)).collect(),
        })
        .expect(Expectation::ShareDecreases {
            rule: rule.clone(),
            from: "before".into(),
            to: "after".into(),
            candidate: "x".into(),
        })
        .expect(Expectation::StepViolation {
            rule,
            profile: "step".into(),
            group,
            candidate: "x".into(),
        });
    inst.willingness = Some(pi.clone());
    Ok(Some(inst))
}

/// The construction's parameters as recorded in an instance.
pub fn nonmonotone_params(inst: &NamedInstance) -> Option<NonmonotoneParams> {
    let get = |k: &str| inst.params.get(k)?.parse::<u64>().ok();
    Some(NonmonotoneParams {
        l1: get("l1")? as usize,
        l2: get("l2")? as usize,
        k: get("k")? as usize,
        t1: get("t1")?,
        t2: get("t2")?,
        t3: get("t3")?,
        n_x: get("n_x")?,
        n_y: get("n_y")?,
        n_z: get("n_z")?,
    })
}
