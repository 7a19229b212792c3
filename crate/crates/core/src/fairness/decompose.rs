use std::collections::VecDeque;

use num_traits::{One, Zero};

use crate::model::{ApprovalProfile, CandidateId, Decomposition, Distribution, ExactDistribution, Scalar, Q};

/// Snapping tolerance for float distributions.
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum DecomposeResult {
    Feasible(Decomposition),
    /// Candidates `X` with `p(X)` above the budget `|{i : A_i ∩ X ≠ ∅}|/n` of their supporters.
    Infeasible {
        candidates: Vec<CandidateId>,
        mass: Q,
        supporters: u64,
    },
}

impl DecomposeResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, DecomposeResult::Feasible(_))
    }
}

struct Edge {
    to: usize,
    cap: Q,
    rev: usize,
}

struct Network {
    adj: Vec<Vec<Edge>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            adj: (0..nodes).map(|_| Vec::new()).collect(),
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: Q) -> usize {
        let fwd = self.adj[from].len();
        let back = self.adj[to].len();
        self.adj[from].push(Edge { to, cap, rev: back });
        self.adj[to].push(Edge {
            to: from,
            cap: Q::zero(),
            rev: fwd,
        });
        fwd
    }

    /// Edmonds–Karp; returns the flow value.
    fn max_flow(&mut self, s: usize, t: usize) -> Q {
        let mut total = Q::zero();
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            while let Some(v) = queue.pop_front() {
                for (i, e) in self.adj[v].iter().enumerate() {
                    if !seen[e.to] && e.cap > Q::zero() {
                        seen[e.to] = true;
                        prev[e.to] = Some((v, i));
                        queue.push_back(e.to);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck: Option<Q> = None;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                let c = &self.adj[u][i].cap;
                if bottleneck.as_ref().is_none_or(|b| c < b) {
                    bottleneck = Some(c.clone());
                }
                v = u;
            }
            let b = bottleneck.expect("path has an edge");
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                self.adj[u][i].cap -= &b;
                let (to, rev) = (self.adj[u][i].to, self.adj[u][i].rev);
                self.adj[to][rev].cap += &b;
                v = u;
            }
            total += b;
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for e in &self.adj[v] {
                if !seen[e.to] && e.cap > Q::zero() {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }
}

/// Splits `p` into individual distributions on the voters' ballots, or
/// returns a set of candidates whose share exceeds what their supporters own.
///
/// Float shares are snapped to nearby rationals first and judged with a slack
/// of [`SNAP_TOL`] per candidate.
pub fn decompose<T: Scalar>(profile: &ApprovalProfile, p: &Distribution<T>) -> DecomposeResult {
    let m = profile.m();
    let groups = profile.groups();
    let n = Q::from_integer(profile.n().into());
    let shares: Vec<Q> = p.shares().iter().map(|s| s.to_q(SNAP_TOL)).collect();
    let slack = if T::EXACT {
        Q::zero()
    } else {
        Q::new((m as i64 + 1).into(), 1_000_000_000i64.into())
    };
    let demand: Q = shares.iter().sum();

    let source = 0;
    let sink = 1 + groups.len() + m;
    let mut net = Network::new(sink + 1);
    let mut group_edges = Vec::with_capacity(groups.len());
    for (gi, g) in groups.iter().enumerate() {
        net.add(source, 1 + gi, Q::from_integer(g.count.into()) / &n);
        let edges: Vec<(CandidateId, usize)> = g
            .ballot
            .iter()
            .map(|x| (x, net.add(1 + gi, 1 + groups.len() + x, Q::one())))
            .collect();
        group_edges.push(edges);
    }
    for (x, s) in shares.iter().enumerate() {
        net.add(1 + groups.len() + x, sink, s.clone());
    }
    let flow = net.max_flow(source, sink);

    if flow + &slack < demand {
        let reach = net.reachable(source);
        let candidates: Vec<CandidateId> =
            (0..m).filter(|&x| !reach[1 + groups.len() + x]).collect();
        let supporters = groups
            .iter()
            .filter(|g| candidates.iter().any(|&x| g.ballot.contains(x)))
            .map(|g| g.count)
            .sum();
        let mass = candidates.iter().map(|&x| shares[x].clone()).sum();
        return DecomposeResult::Infeasible {
            candidates,
            mass,
            supporters,
        };
    }

    let parts = groups
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut part: Vec<Q> = vec![Q::zero(); m];
            for &(x, e) in &group_edges[gi] {
                part[x] = Q::one() - &net.adj[1 + gi][e].cap;
            }
            let total: Q = part.iter().sum();
            if total.is_zero() {
                part[g.ballot.iter().next().expect("nonempty")] = Q::one();
            } else {
                // exact input saturates every source edge; float input is rescaled
                for v in &mut part {
                    *v = &*v / &total;
                }
            }
            ExactDistribution::new(part).expect("normalized part")
        })
        .collect();
    DecomposeResult::Feasible(Decomposition::new(profile, parts).expect("flow respects ballots"))
}
