use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{parse_q, q, render_q, Q};

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Map,
    Ues,
    Mps(Q),
    AdditiveThird,
    /// Row `t - 1` holds `π(t, 1..=t)`.
    Table(Vec<Vec<Q>>),
}

/// A payment willingness function `π(t, j)`: what a voter with `t` approved
/// candidates pays towards their `j`-th funded candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct PaymentWillingness {
    name: String,
    kind: Kind,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    name: String,
    entries: BTreeMap<String, Vec<String>>,
}

pub fn willingness_map() -> PaymentWillingness {
    PaymentWillingness {
        name: "map".into(),
        kind: Kind::Map,
    }
}

pub fn willingness_ues() -> PaymentWillingness {
    PaymentWillingness {
        name: "ues".into(),
        kind: Kind::Ues,
    }
}

pub fn willingness_mps(gamma: Q) -> Result<PaymentWillingness> {
    if gamma.is_negative() || gamma > Q::one() {
        return Err(Error::Willingness {
            t: 0,
            reason: format!("gamma {} outside [0, 1]", render_q(&gamma)),
        });
    }
    Ok(PaymentWillingness {
        name: format!("mps:{}", render_q(&gamma)),
        kind: Kind::Mps(gamma),
    })
}

pub fn willingness_additive_third() -> PaymentWillingness {
    PaymentWillingness {
        name: "add13".into(),
        kind: Kind::AdditiveThird,
    }
}

/// Validated table-driven willingness. `rows[t - 1]` lists `π(t, 1..=t)`.
pub fn willingness_custom(name: &str, rows: Vec<Vec<Q>>) -> Result<PaymentWillingness> {
    if rows.is_empty() {
        return Err(Error::Willingness {
            t: 1,
            reason: "table declares no ballot sizes".into(),
        });
    }
    for (i, row) in rows.iter().enumerate() {
        let t = i + 1;
        let fail = |reason: String| Err(Error::Willingness { t, reason });
        if row.len() != t {
            return fail(format!("expected {t} entries, found {}", row.len()));
        }
        if row.iter().any(|v| v.is_negative()) {
            return fail("negative payment".into());
        }
        let total: Q = row.iter().cloned().fold(Q::zero(), |a, b| a + b);
        if !total.is_one() {
            return fail(format!("payments sum to {}, not 1", render_q(&total)));
        }
        if let Some(j) = (1..t).find(|&j| row[j] > row[j - 1]) {
            return fail(format!("payment {} exceeds payment {}", j + 1, j));
        }
    }
    Ok(PaymentWillingness {
        name: name.to_string(),
        kind: Kind::Table(rows),
    })
}

impl PaymentWillingness {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Largest ballot size the function is defined for.
    pub fn max_ballot_size(&self) -> Option<usize> {
        match &self.kind {
            Kind::Table(rows) => Some(rows.len()),
            _ => None,
        }
    }

    pub fn is_map(&self) -> bool {
        match &self.kind {
            Kind::Map => true,
            Kind::Mps(g) => g.is_zero(),
            _ => false,
        }
    }

    pub fn is_ues(&self) -> bool {
        match &self.kind {
            Kind::Ues => true,
            Kind::Mps(g) => g.is_one(),
            _ => false,
        }
    }

    /// `γ` for the MPS family.
    pub fn mps_gamma(&self) -> Option<&Q> {
        match &self.kind {
            Kind::Mps(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_additive_third(&self) -> bool {
        matches!(self.kind, Kind::AdditiveThird)
    }

    /// `π(t, j)` for `1 ≤ j ≤ t`.
    pub fn pi(&self, t: usize, j: usize) -> Q {
        assert!(t >= 1 && (1..=t).contains(&j), "π({t}, {j}) out of range");
        match &self.kind {
            Kind::Map => {
                if j == 1 {
                    Q::one()
                } else {
                    Q::zero()
                }
            }
            Kind::Ues => q(1, t as i64),
            Kind::Mps(gamma) => {
                // γ^{j-1} / Σ_{i<t} γ^i, which also covers γ = 0
                let mut pow = Q::one();
                let mut denom = Q::zero();
                let mut numer = Q::zero();
                for i in 0..t {
                    if i == j - 1 {
                        numer = pow.clone();
                    }
                    denom += &pow;
                    pow *= gamma;
                }
                numer / denom
            }
            Kind::AdditiveThird => match (t, j) {
                (1, 1) => Q::one(),
                (_, 1) => q(2, 3),
                (_, 2) => q(1, 3),
                _ => Q::zero(),
            },
            Kind::Table(rows) => rows
                .get(t - 1)
                .map(|r| r[j - 1].clone())
                .unwrap_or_else(|| panic!("ballot size {t} not covered by `{}`", self.name)),
        }
    }

    /// `π(t, ·)` as a vector.
    pub fn row(&self, t: usize) -> Vec<Q> {
        (1..=t).map(|j| self.pi(t, j)).collect()
    }

    /// Rejects a function that is undefined for ballots of size `t`.
    pub fn check_covers(&self, t: usize) -> Result<()> {
        match self.max_ballot_size() {
            Some(max) if t > max => Err(Error::Willingness {
                t,
                reason: format!("`{}` only defines ballot sizes up to {max}", self.name),
            }),
            _ => Ok(()),
        }
    }

    /// Table up to ballot size `max_t`, in the JSON willingness format.
    pub fn to_json(&self, max_t: usize) -> serde_json::Value {
        let max_t = self.max_ballot_size().map_or(max_t, |m| m.min(max_t));
        let entries = (1..=max_t)
            .map(|t| (t.to_string(), self.row(t).iter().map(render_q).collect()))
            .collect();
        serde_json::to_value(TableJson {
            name: self.name.clone(),
            entries,
        })
        .expect("table serializes")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let raw: TableJson =
            serde_json::from_str(src).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let mut by_t = BTreeMap::new();
        for (key, row) in &raw.entries {
            let t: usize = key
                .parse()
                .ok()
                .filter(|&t| t >= 1)
                .ok_or_else(|| Error::model(format!("invalid ballot size key `{key}`")))?;
            let row = row.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>()?;
            by_t.insert(t, row);
        }
        let max_t = by_t.keys().next_back().copied().unwrap_or(0);
        let mut rows = Vec::with_capacity(max_t);
        for t in 1..=max_t {
            rows.push(by_t.remove(&t).ok_or_else(|| Error::Willingness {
                t,
                reason: "missing row".into(),
            })?);
        }
        willingness_custom(&raw.name, rows)
    }

    /// Built-in by name: `map`, `ues`, `add13`, `mps:γ`.
    pub fn builtin(spec: &str) -> Result<Self> {
        match spec {
            "map" => Ok(willingness_map()),
            "ues" => Ok(willingness_ues()),
            "add13" => Ok(willingness_additive_third()),
            _ => {
                let gamma = spec
                    .strip_prefix("mps:")
                    .ok_or_else(|| Error::RuleSpec(spec.to_string()))?;
                let gamma = parse_q(gamma).map_err(|_| Error::RuleSpec(spec.to_string()))?;
                willingness_mps(gamma)
            }
        }
    }
}

impl fmt::Display for PaymentWillingness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
