//! The example corpus shipped inside the library.

use std::time::Instant;

use serde::Deserialize;

use crate::checkers::{decide, verify, Caps, EquivalenceKind, Mode, Status};
use crate::io::parse::{parse_marking, parse_net, parse_relation};
use crate::net::Net;
use crate::oracle::interleaving_equivalent;

const FILES: &[(&str, &str)] = &[
    ("bdplace.pn", include_str!("../../corpus/bdplace.pn")),
    ("bdplace.rel", include_str!("../../corpus/bdplace.rel")),
    ("case6.pn", include_str!("../../corpus/case6.pn")),
    ("case6.rel", include_str!("../../corpus/case6.rel")),
    ("matching.pn", include_str!("../../corpus/matching.pn")),
    ("matching.rel", include_str!("../../corpus/matching.rel")),
    ("fig1-r1.rel", include_str!("../../corpus/fig1-r1.rel")),
    ("fig1-r2.rel", include_str!("../../corpus/fig1-r2.rel")),
    ("fig1.pn", include_str!("../../corpus/fig1.pn")),
    ("fig10.pn", include_str!("../../corpus/fig10.pn")),
    ("fig11.pn", include_str!("../../corpus/fig11.pn")),
    ("fig2-rprime.rel", include_str!("../../corpus/fig2-rprime.rel")),
    ("fig2.pn", include_str!("../../corpus/fig2.pn")),
    ("fig4.pn", include_str!("../../corpus/fig4.pn")),
    ("fig5-r1.rel", include_str!("../../corpus/fig5-r1.rel")),
    ("fig5-r2.rel", include_str!("../../corpus/fig5-r2.rel")),
    ("fig5.pn", include_str!("../../corpus/fig5.pn")),
    ("fig7.pn", include_str!("../../corpus/fig7.pn")),
    ("fig8.pn", include_str!("../../corpus/fig8.pn")),
    ("fig8.rel", include_str!("../../corpus/fig8.rel")),
    ("fig9.pn", include_str!("../../corpus/fig9.pn")),
    ("fig9.rel", include_str!("../../corpus/fig9.rel")),
    ("stutt1.pn", include_str!("../../corpus/stutt1.pn")),
];

const MANIFEST: &str = include_str!("../../corpus/manifest.toml");

/// Default state cap for the interleaving oracles.
pub const ORACLE_STATE_CAP: usize = 100_000;

/// Text of an embedded corpus file.
pub fn corpus_file(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn corpus_files() -> impl Iterator<Item = (&'static str, &'static str)> {
    FILES.iter().copied()
}

/// Parses an embedded net; panics if the file is missing or malformed.
pub fn corpus_net(name: &str) -> Net {
    let text = corpus_file(name).unwrap_or_else(|| panic!("no corpus file {name}"));
    parse_net(text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct CorpusCase {
    pub name: String,
    pub net: String,
    /// `place`, `dplace`, `bplace`, `bdplace`, or `int`/`bint` for the oracles.
    pub kind: String,
    /// `exhaustive`, `guided`, `auto` or `verify`.
    pub mode: String,
    pub m1: String,
    pub m2: String,
    #[serde(default)]
    pub relation: Option<String>,
    #[serde(deserialize_with = "status")]
    pub expected: Status,
    #[serde(default)]
    pub tags: Vec<String>,
}

fn status<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Status, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl CorpusCase {
    pub fn is_slow(&self) -> bool {
        self.tags.iter().any(|t| t == "slow")
    }

    pub fn oracle_skip(&self) -> bool {
        self.tags.iter().any(|t| t == "oracle-skip")
    }

    pub fn equivalence(&self) -> Option<EquivalenceKind> {
        self.kind.parse().ok()
    }
}

#[derive(Deserialize)]
struct Manifest {
    case: Vec<CorpusCase>,
}

pub fn cases() -> Vec<CorpusCase> {
    toml::from_str::<Manifest>(MANIFEST).expect("corpus manifest parses").case
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseOutcome {
    pub name: String,
    pub expected: Status,
    pub actual: Option<Status>,
    pub passed: bool,
    pub skipped: bool,
    pub wall_ms: u64,
    pub error: Option<String>,
}

fn evaluate(case: &CorpusCase, caps: &Caps) -> Result<Status, String> {
    let net = parse_net(corpus_file(&case.net).ok_or(format!("missing {}", case.net))?).map_err(|e| e.to_string())?;
    let m1 = parse_marking(&case.m1, &net).map_err(|e| e.to_string())?;
    let m2 = parse_marking(&case.m2, &net).map_err(|e| e.to_string())?;
    if case.kind == "int" || case.kind == "bint" {
        let eq = interleaving_equivalent(&net, &m1, &m2, case.kind == "bint", ORACLE_STATE_CAP).map_err(|e| e.to_string())?;
        return Ok(if eq { Status::Related } else { Status::NotRelated });
    }
    let kind: EquivalenceKind = case.kind.parse()?;
    let verdict = if case.mode == "verify" {
        let file = case.relation.as_deref().ok_or("verify case without relation")?;
        let rel = parse_relation(corpus_file(file).ok_or(format!("missing {file}"))?, &net).map_err(|e| e.to_string())?;
        verify(&net, &rel, kind, &m1, &m2)
    } else {
        let mode: Mode = case.mode.parse()?;
        decide(&net, &m1, &m2, kind, mode, caps)
    }
    .map_err(|e| e.to_string())?;
    Ok(verdict.status)
}

pub fn run_case(case: &CorpusCase) -> CaseOutcome {
    run_case_with(case, &Caps::default())
}

pub fn run_case_with(case: &CorpusCase, caps: &Caps) -> CaseOutcome {
    let start = Instant::now();
    let res = evaluate(case, caps);
    let wall_ms = start.elapsed().as_millis() as u64;
    let (actual, error) = match res {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e)),
    };
    CaseOutcome {
        name: case.name.clone(),
        expected: case.expected,
        passed: actual == Some(case.expected),
        actual,
        skipped: false,
        wall_ms,
        error,
    }
}

/// Runs every case; slow ones are reported as skipped unless asked for.
pub fn run_corpus(include_slow: bool) -> Vec<CaseOutcome> {
    cases()
        .iter()
        .map(|c| {
            if c.is_slow() && !include_slow {
                CaseOutcome {
                    name: c.name.clone(),
                    expected: c.expected,
                    actual: None,
                    passed: true,
                    skipped: true,
                    wall_ms: 0,
                    error: None,
                }
            } else {
                run_case(c)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_refers_to_embedded_files() {
        let cs = cases();
        assert!(cs.len() >= 20);
        for c in &cs {
            let net = corpus_net(&c.net);
            parse_marking(&c.m1, &net).unwrap();
            parse_marking(&c.m2, &net).unwrap();
            if let Some(r) = &c.relation {
                parse_relation(corpus_file(r).unwrap(), &net).unwrap();
            }
            assert!(c.expected != Status::Unknown);
        }
    }

    #[test]
    fn every_file_parses() {
        for (name, text) in corpus_files() {
            if name.ends_with(".pn") {
                parse_net(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
    }
}
