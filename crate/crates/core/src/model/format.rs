//! Text and JSON encodings of profiles and distributions.
//!
//! Text profiles look like
//!
//! ```text
//! candidates: a b c d
//! 4: a b
//! 4: a   # comment
//! ```
//!
//! and the JSON mirror is `{"candidates": [...], "groups": [{"count": k, "ballot": [...]}]}`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::distribution::{Distribution, ExactDistribution, FloatDistribution};
use super::profile::{ApprovalBallot, ApprovalProfile, Group};
use super::scalar::{parse_q, Scalar, Q};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct ProfileJson {
    candidates: Vec<String>,
    groups: Vec<GroupJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GroupJson {
    count: u64,
    ballot: Vec<String>,
}

/// A distribution in whichever backend produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyDistribution {
    Exact(ExactDistribution),
    Float(FloatDistribution),
}

impl AnyDistribution {
    pub fn to_f64(&self) -> FloatDistribution {
        match self {
            AnyDistribution::Exact(d) => d.to_f64(),
            AnyDistribution::Float(d) => d.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&ExactDistribution> {
        match self {
            AnyDistribution::Exact(d) => Some(d),
            AnyDistribution::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyDistribution::Exact(_))
    }

    pub fn m(&self) -> usize {
        match self {
            AnyDistribution::Exact(d) => d.m(),
            AnyDistribution::Float(d) => d.m(),
        }
    }

    pub fn render(&self) -> Vec<String> {
        match self {
            AnyDistribution::Exact(d) => d.render(),
            AnyDistribution::Float(d) => d.render(),
        }
    }

    /// `{"name": share}` with rationals as strings and floats as numbers.
    pub fn to_json(&self, profile: &ApprovalProfile) -> Value {
        let mut map = Map::new();
        match self {
            AnyDistribution::Exact(d) => shares_json(&mut map, profile, d),
            AnyDistribution::Float(d) => shares_json(&mut map, profile, d),
        }
        Value::Object(map)
    }
}

fn shares_json<T: Scalar>(map: &mut Map<String, Value>, profile: &ApprovalProfile, d: &Distribution<T>) {
    for (x, s) in d.shares().iter().enumerate() {
        map.insert(profile.name(x).to_string(), s.to_json());
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_profile_text(src: &str) -> Result<ApprovalProfile> {
    let mut candidates: Option<Vec<String>> = None;
    let mut groups = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(line_no, "expected `<count>: <names>` or `candidates: ...`"))?;
        let head = head.trim();
        if head == "candidates" {
            if candidates.is_some() {
                return Err(Error::parse(line_no, "candidates declared twice"));
            }
            candidates = Some(rest.split_whitespace().map(str::to_string).collect());
            continue;
        }
        let names = candidates
            .as_ref()
            .ok_or_else(|| Error::parse(line_no, "groups must follow the `candidates:` line"))?;
        let count: u64 = head
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid count `{head}`")))?;
        let ids = rest
            .split_whitespace()
            .map(|b| {
                names
                    .iter()
                    .position(|n| n == b)
                    .ok_or_else(|| Error::parse(line_no, format!("unknown candidate `{b}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let ballot = ApprovalBallot::new(ids).map_err(|_| Error::parse(line_no, "empty ballot"))?;
        groups.push(Group { ballot, count });
    }
    let candidates = candidates.ok_or_else(|| Error::parse(1, "missing `candidates:` line"))?;
    ApprovalProfile::new(candidates, groups)
}

pub fn render_profile_text(profile: &ApprovalProfile) -> String {
    profile.to_string()
}

pub fn parse_profile_json(src: &str) -> Result<ApprovalProfile> {
    let raw: ProfileJson =
        serde_json::from_str(src).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let mut rows = Vec::with_capacity(raw.groups.len());
    for g in &raw.groups {
        let ids = g
            .ballot
            .iter()
            .map(|b| {
                raw.candidates
                    .iter()
                    .position(|n| n == b)
                    .ok_or_else(|| Error::model(format!("unknown candidate `{b}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(Group {
            ballot: ApprovalBallot::new(ids)?,
            count: g.count,
        });
    }
    ApprovalProfile::new(raw.candidates, rows)
}

pub fn profile_to_json(profile: &ApprovalProfile) -> Value {
    let raw = ProfileJson {
        candidates: profile.candidates().to_vec(),
        groups: profile
            .groups()
            .iter()
            .map(|g| GroupJson {
                count: g.count,
                ballot: profile.ballot_names(&g.ballot).into_iter().map(str::to_string).collect(),
            })
            .collect(),
    };
    serde_json::to_value(raw).expect("profile serializes")
}

/// Parses either encoding, choosing JSON when the input starts with `{`.
pub fn parse_profile(src: &str) -> Result<ApprovalProfile> {
    if src.trim_start().starts_with('{') {
        parse_profile_json(src)
    } else {
        parse_profile_text(src)
    }
}

enum RawShare {
    Exact(Q),
    Float(f64),
}

/// Reads a distribution over `profile`'s candidates.
///
/// JSON input is an object from names to shares, optionally nested under
/// `"distribution"` or `"shares"`; string shares are exact and numeric shares
/// are floats. Text input has one `name: value` line per candidate. Unlisted
/// candidates get share zero. Any float share puts the whole distribution on
/// the float backend.
pub fn parse_distribution(profile: &ApprovalProfile, src: &str) -> Result<AnyDistribution> {
    let entries = if src.trim_start().starts_with('{') {
        let value: Value =
            serde_json::from_str(src).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let obj = value
            .get("distribution")
            .or_else(|| value.get("shares"))
            .unwrap_or(&value)
            .as_object()
            .ok_or_else(|| Error::model("distribution JSON must be an object"))?
            .clone();
        obj.into_iter()
            .map(|(name, v)| {
                let share = match v {
                    Value::String(s) => RawShare::Exact(parse_q(&s)?),
                    Value::Number(n) => RawShare::Float(
                        n.as_f64().ok_or_else(|| Error::model("non-finite share"))?,
                    ),
                    other => return Err(Error::model(format!("invalid share {other} for `{name}`"))),
                };
                Ok((name, share))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let mut out = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (name, value) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(i + 1, "expected `<name>: <share>`"))?;
            let value = value.trim();
            let share = match parse_q(value) {
                Ok(q) => RawShare::Exact(q),
                Err(_) => RawShare::Float(
                    value
                        .parse()
                        .map_err(|_| Error::parse(i + 1, format!("invalid share `{value}`")))?,
                ),
            };
            out.push((name.trim().to_string(), share));
        }
        out
    };

    let m = profile.m();
    let mut exact = vec![Q::from_ratio(0, 1); m];
    let mut float = vec![0.0f64; m];
    let mut seen = vec![false; m];
    let mut any_float = false;
    for (name, share) in entries {
        let x = profile
            .candidate_index(&name)
            .ok_or_else(|| Error::model(format!("unknown candidate `{name}` in distribution")))?;
        if seen[x] {
            return Err(Error::model(format!("candidate `{name}` listed twice")));
        }
        seen[x] = true;
        match share {
            RawShare::Exact(q) => {
                float[x] = Scalar::to_f64(&q);
                exact[x] = q;
            }
            RawShare::Float(f) => {
                any_float = true;
                float[x] = f;
            }
        }
    }
    if any_float {
        Ok(AnyDistribution::Float(Distribution::new(float)?))
    } else {
        Ok(AnyDistribution::Exact(Distribution::new(exact)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::scalar::q;

    const EXAMPLE: &str = "candidates: a b c d\n# MAP example\n4: a b\n4: a\n2: b c\n1: c d\n1: d  # last\n";

    #[test]
    fn text_round_trip() {
        let p = parse_profile_text(EXAMPLE).unwrap();
        assert_eq!(p.n(), 12);
        let again = parse_profile_text(&render_profile_text(&p)).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn json_round_trip() {
        let p = parse_profile_text(EXAMPLE).unwrap();
        let js = profile_to_json(&p).to_string();
        assert_eq!(parse_profile(&js).unwrap(), p);
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let err = parse_profile_text("candidates: a b\n2: a\nx: b\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                msg: "invalid count `x`".into()
            }
        );
        assert!(matches!(
            parse_profile_text("candidates: a\n1: z\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_profile_text("1: a\n").is_err());
    }

    #[test]
    fn distributions() {
        let p = parse_profile_text(EXAMPLE).unwrap();
        let d = parse_distribution(&p, r#"{"a": "2/3", "c": "1/4", "d": "1/12"}"#).unwrap();
        assert_eq!(d.as_exact().unwrap().share(0), &q(2, 3));
        assert_eq!(d.as_exact().unwrap().share(1), &q(0, 1));
        let f = parse_distribution(&p, r#"{"distribution": {"a": 0.5, "b": "1/2"}}"#).unwrap();
        assert!(!f.is_exact());
        let t = parse_distribution(&p, "a: 1/2\nb: 0.5\n").unwrap();
        assert_eq!(t.as_exact().unwrap().share(1), &q(1, 2));
        assert!(parse_distribution(&p, "a: 1/2\n").is_err());
        assert!(parse_distribution(&p, "e: 1\n").is_err());
    }
}
