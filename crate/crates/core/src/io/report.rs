//! Machine-readable reports.
//!
//! Schema (all fields always present):
//!
//! ```json
//! {
//!   "command": "verify",
//!   "query": { "net": "tau1", "kind": "place", "mode": "verify", "m1": "s1+s2", "m2": "s1+s2" },
//!   "verdict": "unknown",
//!   "mode_used": "verify",
//!   "note": "the relation violates the bisimulation conditions",
//!   "witness": [["s1", "s1"], ["s1", "s2"], ["s2", "s1"], ["s2", "s2"], ["s3", "s3"]],
//!   "violations": [{ "transition": "t1", "opposing": "2*s1", "side": 1, "reason": "no-response", "details": "..." }],
//!   "stats": { "relations_examined": 1, "matchings_solved": 30, "universe_size": 0, "wall_ms": 0 }
//! }
//! ```
//!
//! Place names are used throughout; `"0"` stands for θ.

use serde::{Deserialize, Serialize};

use crate::checkers::{Stats, Verdict};
use crate::io::parse::{parse_marking, ParseError};
use crate::net::Net;
use crate::relations::{PlaceOrTheta, PlaceRelation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryEcho {
    pub net: String,
    pub kind: String,
    pub mode: String,
    pub m1: String,
    pub m2: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonViolation {
    pub transition: String,
    pub opposing: String,
    pub side: u8,
    pub reason: String,
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonReport {
    pub command: String,
    pub query: QueryEcho,
    pub verdict: String,
    pub mode_used: String,
    pub note: Option<String>,
    pub witness: Option<Vec<(String, String)>>,
    pub violations: Vec<JsonViolation>,
    pub stats: Stats,
}

fn kebab<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

impl JsonReport {
    pub fn from_verdict(net: &Net, command: &str, query: QueryEcho, v: &Verdict) -> Self {
        JsonReport {
            command: command.to_string(),
            query,
            verdict: v.status.to_string(),
            mode_used: kebab(&v.mode_used),
            note: v.note.clone(),
            witness: v.witness.as_ref().map(|r| {
                r.pairs().map(|(a, b)| (a.display(net).to_string(), b.display(net).to_string())).collect()
            }),
            violations: v
                .violations
                .iter()
                .map(|x| JsonViolation {
                    transition: net.transition(x.transition).name.clone(),
                    opposing: net.format_marking(&x.opposing),
                    side: x.side,
                    reason: kebab(&x.reason),
                    details: x.details.clone(),
                })
                .collect(),
            stats: v.stats.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// The embedded witness resolved against `net`.
    pub fn witness_relation(&self, net: &Net) -> Result<Option<PlaceRelation>, ParseError> {
        let Some(pairs) = &self.witness else { return Ok(None) };
        let side = |n: &str| -> Result<PlaceOrTheta, ParseError> {
            if n == "0" {
                return Ok(PlaceOrTheta::Theta);
            }
            net.place(n)
                .map(PlaceOrTheta::Place)
                .ok_or(ParseError { line: 1, col: 1, msg: format!("undeclared place `{n}`") })
        };
        let mut r = PlaceRelation::new();
        for (a, b) in pairs {
            r.insert(side(a)?, side(b)?).map_err(|e| ParseError { line: 1, col: 1, msg: e.to_string() })?;
        }
        Ok(Some(r))
    }

    pub fn markings(&self, net: &Net) -> Result<(crate::net::Marking, crate::net::Marking), ParseError> {
        Ok((parse_marking(&self.query.m1, net)?, parse_marking(&self.query.m2, net)?))
    }
}
