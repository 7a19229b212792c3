use std::fmt;

use serde_json::{json, Value};

use crate::model::{profile_to_json, ApprovalProfile, CandidateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails,
    /// Within tolerance of the boundary on the float backend.
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        }
    }

    /// Combines per-candidate outcomes: any failure wins, then any doubt.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Holds,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The inputs a verdict was computed from; enough to re-run the check.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckInput {
    Single(ApprovalProfile),
    Pair(ApprovalProfile, ApprovalProfile),
    Step {
        profile: ApprovalProfile,
        group: usize,
        candidate: CandidateId,
    },
}

impl CheckInput {
    pub fn to_json(&self) -> Value {
        match self {
            CheckInput::Single(p) => json!({"profile": profile_to_json(p)}),
            CheckInput::Pair(a, b) => json!({"a": profile_to_json(a), "b": profile_to_json(b)}),
            CheckInput::Step {
                profile,
                group,
                candidate,
            } => json!({
                "profile": profile_to_json(profile),
                "group": group,
                "candidate": profile.name(*candidate),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub candidate: Option<CandidateId>,
    /// Labelled values, e.g. `("f(A)", "1/10")`.
    pub values: Vec<(String, String)>,
    pub bound: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomVerdict {
    pub axiom: String,
    pub rule: String,
    pub status: Status,
    pub input: CheckInput,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl AxiomVerdict {
    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }

    fn candidate_names(&self) -> Option<&ApprovalProfile> {
        match &self.input {
            CheckInput::Single(p) | CheckInput::Pair(p, _) => Some(p),
            CheckInput::Step { profile, .. } => Some(profile),
        }
    }

    pub fn to_json(&self) -> Value {
        let names = self.candidate_names();
        let witness = self.witness.as_ref().map(|w| {
            json!({
                "candidate": w.candidate.and_then(|x| names.map(|p| p.name(x).to_string())),
                "values": w.values.iter().map(|(k, v)| json!({"label": k, "value": v})).collect::<Vec<_>>(),
                "bound": w.bound,
            })
        });
        json!({
            "axiom": self.axiom,
            "rule": self.rule,
            "status": self.status.as_str(),
            "witness": witness,
            "input": self.input.to_json(),
            "notes": self.notes,
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{} / {}: {}", self.axiom, self.rule, self.status);
        if let Some(w) = &self.witness {
            if let (Some(x), Some(p)) = (w.candidate, self.candidate_names()) {
                out.push_str(&format!(" at {}", p.name(x)));
            }
            for (k, v) in &w.values {
                out.push_str(&format!("\n  {k} = {v}"));
            }
            if let Some(b) = &w.bound {
                out.push_str(&format!("\n  bound: {b}"));
            }
        }
        for note in &self.notes {
            out.push_str(&format!("\n  note: {note}"));
        }
        out
    }
}
