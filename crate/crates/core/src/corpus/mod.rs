//! Generators for every named counterexample profile and profile family.

mod families;
mod instance;
mod named;
mod nonmonotone;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::seqpay::PaymentWillingness;

pub use families::{
    gen_cut_lb, gen_fut_lb, gen_map_afs_tight, gen_map_core_family, gen_prop_lb_w0, gen_prop_lb_wz, gen_ues_lb,
};
pub use instance::{Expectation, ExpectationCheck, NamedInstance};
pub use named::{
    gen_cut_wpc, gen_fut_wpc, gen_map_example, gen_map_strategyproofness, gen_nash_rpc, gen_nash_rpc_large,
    gen_spc_impossibility,
};
pub use nonmonotone::{gen_nonmonotone, nonmonotone_params, Generated, NonmonotoneParams};

/// A catalog entry: id, parameters with defaults, summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub params: &'static [(&'static str, &'static str)],
    pub summary: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { id: "map_example", params: &[], summary: "MAP on a five-group profile" },
    CatalogEntry { id: "spc_impossibility", params: &[], summary: "no unanimous rule is strictly population consistent" },
    CatalogEntry { id: "cut_wpc", params: &[], summary: "CUT fails weak population consistency" },
    CatalogEntry { id: "fut_wpc", params: &[], summary: "FUT fails weak population consistency" },
    CatalogEntry { id: "nash_rpc", params: &[], summary: "Nash fails ranked population consistency" },
    CatalogEntry { id: "nash_rpc_large", params: &[], summary: "Nash lifts a zero-share candidate" },
    CatalogEntry { id: "cut_lb", params: &[("n", "8")], summary: "CUT AFS and core lower bound" },
    CatalogEntry { id: "fut_lb", params: &[("n", "9")], summary: "FUT AFS and core lower bound" },
    CatalogEntry { id: "ues_lb", params: &[("n", "4")], summary: "UES AFS lower bound" },
    CatalogEntry { id: "map_afs_tight", params: &[("l", "3")], summary: "MAP AFS factor 2l/(l+3)" },
    CatalogEntry { id: "map_core_family", params: &[("k", "3")], summary: "MAP core factor k/2" },
    CatalogEntry { id: "nonmonotone", params: &[("rule", "mps:1/2")], summary: "sequential rule fails monotonicity" },
    CatalogEntry { id: "map_strategyproofness", params: &[], summary: "MAP is manipulable" },
    CatalogEntry { id: "prop_lb_w0", params: &[("t", "2"), ("l", "3")], summary: "first payment to a shared candidate" },
    CatalogEntry {
        id: "prop_lb_wz",
        params: &[("rule", "mps:1/3"), ("t", "2"), ("z", "1"), ("l", "2"), ("denom", "60")],
        summary: "fillers fix the processing order",
    },
];

pub fn catalog_entry(id: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.id == id)
}

/// Parses `key=value` arguments.
pub fn parse_params<S: AsRef<str>>(args: &[S]) -> Result<BTreeMap<String, String>> {
    args.iter()
        .map(|a| {
            let a = a.as_ref();
            a.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Precondition(format!("expected key=value, got `{a}`")))
        })
        .collect()
}

/// A builtin willingness name, or a path to a JSON willingness table.
pub fn resolve_willingness(spec: &str) -> Result<PaymentWillingness> {
    match PaymentWillingness::builtin(spec) {
        Ok(pi) => Ok(pi),
        Err(e) => match std::fs::read_to_string(spec) {
            Ok(src) => PaymentWillingness::from_json(&src),
            Err(_) => Err(e),
        },
    }
}

/// Builds instance `id`, filling unset parameters from the catalog defaults.
pub fn emit(id: &str, params: &BTreeMap<String, String>) -> Result<Generated> {
    let entry = catalog_entry(id).ok_or_else(|| Error::Precondition(format!("unknown corpus id `{id}`")))?;
    if let Some(k) = params.keys().find(|k| !entry.params.iter().any(|(p, _)| p == k)) {
        return Err(Error::Precondition(format!("{id} takes no parameter `{k}`")));
    }
    let raw = |key: &str| -> &str {
        params.get(key).map(String::as_str).unwrap_or_else(|| {
            entry.params.iter().find(|(p, _)| *p == key).map(|(_, d)| *d).expect("declared parameter")
        })
    };
    let num = |key: &str| -> Result<u64> {
        raw(key)
            .parse()
            .map_err(|_| Error::Precondition(format!("parameter {key} must be a nonnegative integer, got `{}`", raw(key))))
    };
    let one = |inst: NamedInstance| Ok(Generated::Instance(Box::new(inst)));
    match id {
        "map_example" => one(gen_map_example()),
        "spc_impossibility" => one(gen_spc_impossibility()),
        "cut_wpc" => one(gen_cut_wpc()),
        "fut_wpc" => one(gen_fut_wpc()),
        "nash_rpc" => one(gen_nash_rpc()),
        "nash_rpc_large" => one(gen_nash_rpc_large()),
        "map_strategyproofness" => one(gen_map_strategyproofness()),
        "cut_lb" => one(gen_cut_lb(num("n")?)?),
        "fut_lb" => one(gen_fut_lb(num("n")?)?),
        "ues_lb" => one(gen_ues_lb(num("n")?)?),
        "map_afs_tight" => one(gen_map_afs_tight(num("l")?)?),
        "map_core_family" => {
            let k = u32::try_from(num("k")?).map_err(|_| Error::Precondition("k too large".into()))?;
            one(gen_map_core_family(k)?)
        }
        "nonmonotone" => gen_nonmonotone(&resolve_willingness(raw("rule"))?),
        "prop_lb_w0" => one(gen_prop_lb_w0(num("t")?, num("l")?)?),
        "prop_lb_wz" => one(gen_prop_lb_wz(
            &resolve_willingness(raw("rule"))?,
            num("t")?,
            num("z")?,
            num("l")?,
            num("denom")?,
        )?),
        _ => unreachable!("catalog and dispatch agree"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_verifies() {
        for e in CATALOG {
            if e.id.starts_with("nash") {
                continue;
            }
            let Generated::Instance(inst) = emit(e.id, &BTreeMap::new()).unwrap_or_else(|err| panic!("{}: {err}", e.id)) else {
                panic!("{} not applicable", e.id);
            };
            for c in inst.verify().unwrap() {
                assert!(c.passed, "{}: {} ({})", e.id, c.label, c.detail);
            }
        }
    }

    #[test]
    fn params_checked() {
        let p = parse_params(&["n=6"]).unwrap();
        assert!(emit("cut_lb", &p).is_ok());
        assert!(emit("cut_lb", &parse_params(&["n=7"]).unwrap()).is_err());
        assert!(emit("cut_lb", &parse_params(&["k=3"]).unwrap()).is_err());
        assert!(emit("nope", &BTreeMap::new()).is_err());
        assert!(parse_params(&["n"]).is_err());
    }

    #[test]
    fn map_and_ues_not_applicable() {
        for r in ["map", "ues", "mps:0", "mps:1"] {
            let pi = PaymentWillingness::builtin(r).unwrap();
            assert!(matches!(gen_nonmonotone(&pi).unwrap(), Generated::NotApplicable(_)), "{r}");
        }
    }
}
