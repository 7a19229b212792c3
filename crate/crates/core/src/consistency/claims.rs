use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::model::{q, Q};
use crate::rule::Rule;

use super::checks::Axiom;

/// Axioms each rule is known to satisfy; decides fuzz exit codes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClaimsTable {
    overrides: BTreeMap<String, Vec<Axiom>>,
}

/// Built-in claims by rule family.
pub fn builtin_claims(rule: &Rule) -> Vec<Axiom> {
    use Axiom::*;
    let map = || vec![Monotonicity, Rpc, Wpc, Unanimity, AfsBound(q(2, 1))];
    let ues = || vec![Monotonicity, Spc, Rpc, Wpc];
    match rule {
        Rule::Cut | Rule::Fut => vec![Monotonicity],
        Rule::Nash(_) => vec![Wpc, AfsBound(Q::one()), CoreBound(Q::one())],
        Rule::Sequential(pi) => {
            if pi.is_map() {
                map()
            } else if pi.is_ues() {
                ues()
            } else if pi.is_additive_third() {
                vec![Rpc, Wpc, AfsBound(q(3, 2))]
            } else if let Some(g) = pi.mps_gamma() {
                let bound = if g <= &q(1, 3) {
                    q(2, 1) / (Q::one() + g)
                } else {
                    Q::one() / (Q::one() - g)
                };
                vec![Rpc, Wpc, AfsBound(bound)]
            } else {
                vec![Rpc, Wpc]
            }
        }
    }
}

impl ClaimsTable {
    /// Reads `{"rule name": ["axiom", ...], ...}`; listed rules replace their built-in claims.
    pub fn from_json(src: &str) -> Result<Self> {
        let raw: BTreeMap<String, Vec<String>> =
            serde_json::from_str(src).map_err(|e| Error::Precondition(format!("claims file: {e}")))?;
        let overrides = raw
            .into_iter()
            .map(|(rule, axioms)| {
                let parsed = axioms.iter().map(|a| Axiom::parse(a)).collect::<Result<Vec<_>>>()?;
                Ok((rule, parsed))
            })
            .collect::<Result<_>>()?;
        Ok(ClaimsTable { overrides })
    }

    pub fn claims(&self, rule: &Rule) -> Vec<Axiom> {
        self.overrides
            .get(&rule.name())
            .cloned()
            .unwrap_or_else(|| builtin_claims(rule))
    }

    /// A bound axiom counts as claimed when some claimed bound is at least as strong.
    pub fn is_claimed(&self, rule: &Rule, axiom: &Axiom) -> bool {
        self.claims(rule).iter().any(|c| match (c, axiom) {
            (Axiom::AfsBound(have), Axiom::AfsBound(want)) => have <= want,
            (Axiom::CoreBound(have), Axiom::CoreBound(want)) => have <= want,
            (c, a) => c == a,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(s: &str) -> Rule {
        Rule::parse(s).unwrap()
    }

    #[test]
    fn builtin_table() {
        let t = ClaimsTable::default();
        assert!(t.is_claimed(&rule("map"), &Axiom::AfsBound(q(5, 2))));
        assert!(!t.is_claimed(&rule("map"), &Axiom::AfsBound(q(3, 2))));
        assert!(t.is_claimed(&rule("mps:1/3"), &Axiom::AfsBound(q(3, 2))));
        assert!(t.is_claimed(&rule("mps:1/2"), &Axiom::AfsBound(q(2, 1))));
        assert!(t.is_claimed(&rule("mps:1/5"), &Axiom::AfsBound(q(5, 3))));
        assert!(t.is_claimed(&rule("mps:0"), &Axiom::Monotonicity));
        assert!(t.is_claimed(&rule("mps:1"), &Axiom::Spc));
        assert!(!t.is_claimed(&rule("mps:1/2"), &Axiom::Monotonicity));
        assert!(!t.is_claimed(&rule("cut"), &Axiom::Wpc));
        assert!(t.is_claimed(&rule("nash"), &Axiom::CoreBound(q(1, 1))));
    }

    #[test]
    fn overrides() {
        let t = ClaimsTable::from_json(r#"{"cut": ["wpc", "afs_bound:2"]}"#).unwrap();
        assert!(t.is_claimed(&rule("cut"), &Axiom::Wpc));
        assert!(!t.is_claimed(&rule("cut"), &Axiom::Monotonicity));
        assert!(t.is_claimed(&rule("map"), &Axiom::Monotonicity));
        assert!(ClaimsTable::from_json(r#"{"cut": ["bogus"]}"#).is_err());
    }
}
