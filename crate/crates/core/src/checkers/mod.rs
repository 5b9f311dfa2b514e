//! Checking candidate relations against the finite bisimulation conditions
//! and deciding the equivalences.

mod decide;
mod guided;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{Marking, Net, NetError, Transition, TransitionId};
use crate::relations::{member_d, member_plain, related_on_index, MatchWitness, PlaceRelation, RelIndex, Side};
use crate::silent::{silent_graph, Direction, GoalSpec, Membership, Search, SilentError, SilentGraph, SilentWitness};

pub use decide::{decide, pair_universe, Caps, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquivalenceKind {
    Place,
    DPlace,
    BranchingPlace,
    BranchingDPlace,
}

impl EquivalenceKind {
    pub fn is_d(self) -> bool {
        matches!(self, EquivalenceKind::DPlace | EquivalenceKind::BranchingDPlace)
    }

    pub fn is_branching(self) -> bool {
        matches!(self, EquivalenceKind::BranchingPlace | EquivalenceKind::BranchingDPlace)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EquivalenceKind::Place => "place",
            EquivalenceKind::DPlace => "dplace",
            EquivalenceKind::BranchingPlace => "bplace",
            EquivalenceKind::BranchingDPlace => "bdplace",
        }
    }
}

impl fmt::Display for EquivalenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EquivalenceKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "place" => Ok(EquivalenceKind::Place),
            "dplace" => Ok(EquivalenceKind::DPlace),
            "bplace" => Ok(EquivalenceKind::BranchingPlace),
            "bdplace" => Ok(EquivalenceKind::BranchingDPlace),
            _ => Err(format!("unknown equivalence `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationReason {
    NoResponse,
    ClosureFailure,
}

/// A failing condition instance: `transition` fired on `side` could not be
/// answered from the `opposing` marking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub transition: TransitionId,
    pub opposing: Marking,
    pub side: u8,
    pub reason: ViolationReason,
    pub details: String,
}

/// A successful answer recorded while checking a relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Response {
    pub side: u8,
    pub challenger: TransitionId,
    pub opposing: Marking,
    pub responder: Option<TransitionId>,
    pub silent: Option<SilentWitness>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub responses: Vec<Response>,
    pub matchings_solved: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Silent(#[from] SilentError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("pair universe has {0} pairs, too many for exhaustive enumeration")]
    UniverseTooLarge(usize),
    #[error("internal error: search produced a relation that fails re-checking")]
    InvalidWitness,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct CheckOptions {
    pub stop_at_first: bool,
    pub record: bool,
    pub node_budget: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { stop_at_first: false, record: true, node_budget: crate::silent::DEFAULT_NODE_BUDGET }
    }
}

/// Membership queries against one relation, memoized for the run.
pub(crate) struct RelCtx {
    full: RelIndex,
    bar: RelIndex,
    memo: HashMap<(Marking, Marking, bool), bool>,
    pub matchings: u64,
}

impl RelCtx {
    pub(crate) fn new(full: RelIndex) -> Self {
        let bar = full.bar();
        RelCtx { full, bar, memo: HashMap::new(), matchings: 0 }
    }

    pub(crate) fn plain(&mut self, a: &Marking, b: &Marking) -> bool {
        if a.size() != b.size() {
            return false;
        }
        if let Some(&r) = self.memo.get(&(a.clone(), b.clone(), false)) {
            return r;
        }
        self.matchings += 1;
        let r = member_plain(&self.bar, a, b, false).is_some();
        self.memo.insert((a.clone(), b.clone(), false), r);
        r
    }

    pub(crate) fn d(&mut self, a: &Marking, b: &Marking) -> bool {
        if let Some(&r) = self.memo.get(&(a.clone(), b.clone(), true)) {
            return r;
        }
        self.matchings += 1;
        let r = member_d(&self.full, a, b, false).is_some();
        self.memo.insert((a.clone(), b.clone(), true), r);
        r
    }
}

impl Membership for RelCtx {
    fn member(&mut self, a: &Marking, b: &Marking) -> bool {
        self.plain(a, b)
    }
    fn witness(&mut self, a: &Marking, b: &Marking) -> Option<MatchWitness> {
        member_plain(&self.bar, a, b, true)
    }
}

/// Evaluates the finite conditions of one equivalence kind.
pub(crate) struct Engine<'a> {
    pub net: &'a Net,
    pub graph: SilentGraph,
    pub kind: EquivalenceKind,
    pub opts: CheckOptions,
}

enum Outcome {
    Answered(Response),
    Failed(ViolationReason, String),
}

impl<'a> Engine<'a> {
    pub(crate) fn new(net: &'a Net, kind: EquivalenceKind, opts: CheckOptions) -> Self {
        Engine { net, graph: silent_graph(net), kind, opts }
    }

    pub(crate) fn index(&self, rel: &PlaceRelation) -> RelIndex {
        RelIndex::from_relation(rel, self.net.place_count())
    }

    pub(crate) fn check(&self, ctx: &mut RelCtx) -> Result<CheckReport, CheckError> {
        let mut report = CheckReport { ok: true, ..Default::default() };
        for side in [Side::Left, Side::Right] {
            for t in self.net.transitions() {
                let src = if self.kind.is_d() { &ctx.full } else { &ctx.bar };
                let opposing = related_on_index(src, &t.pre, side);
                for m in opposing {
                    match self.instance(ctx, t, &m, side)? {
                        Outcome::Answered(r) => {
                            if self.opts.record {
                                report.responses.push(r);
                            }
                        }
                        Outcome::Failed(reason, details) => {
                            report.ok = false;
                            report.violations.push(Violation {
                                transition: t.id,
                                opposing: m,
                                side: side_no(side),
                                reason,
                                details,
                            });
                            if self.opts.stop_at_first {
                                report.matchings_solved = ctx.matchings;
                                return Ok(report);
                            }
                        }
                    }
                }
            }
        }
        report.matchings_solved = ctx.matchings;
        Ok(report)
    }

    // Membership with the challenger's marking first.
    fn rel_plain(ctx: &mut RelCtx, side: Side, challenger: &Marking, responder: &Marking) -> bool {
        match side {
            Side::Left => ctx.plain(challenger, responder),
            Side::Right => ctx.plain(responder, challenger),
        }
    }

    fn rel_post(&self, ctx: &mut RelCtx, side: Side, challenger: &Marking, responder: &Marking) -> bool {
        let (a, b) = match side {
            Side::Left => (challenger, responder),
            Side::Right => (responder, challenger),
        };
        if self.kind.is_d() {
            ctx.d(a, b)
        } else {
            ctx.plain(a, b)
        }
    }

    fn instance(&self, ctx: &mut RelCtx, t1: &Transition, m: &Marking, side: Side) -> Result<Outcome, CheckError> {
        let name = &t1.name;
        if m.size() != t1.pre.size() {
            return Ok(Outcome::Failed(
                ViolationReason::NoResponse,
                format!("a pre-set token of {name} is related to θ only"),
            ));
        }
        let mut post_failure = false;
        if !self.kind.is_branching() {
            for t2 in self.net.transitions().iter().filter(|t2| &t2.pre == m && t2.label == t1.label) {
                if self.rel_post(ctx, side, &t1.post, &t2.post) {
                    return Ok(Outcome::Answered(Response {
                        side: side_no(side),
                        challenger: t1.id,
                        opposing: m.clone(),
                        responder: Some(t2.id),
                        silent: None,
                    }));
                }
                post_failure = true;
            }
        } else {
            let dir = match side {
                Side::Left => Direction::Psi,
                Side::Right => Direction::Phi,
            };
            let search = Search { net: self.net, graph: &self.graph, budget: self.opts.node_budget };
            if t1.is_tau_sequential() {
                let goal = GoalSpec::Either { transition: t1.id };
                if let Some(w) = search.run(ctx, &t1.pre, m, dir, goal, 1)?.into_iter().next() {
                    return Ok(Outcome::Answered(Response {
                        side: side_no(side),
                        challenger: t1.id,
                        opposing: m.clone(),
                        responder: None,
                        silent: Some(w),
                    }));
                }
            }
            for t2 in self.net.transitions() {
                if t2.label != t1.label || t2.pre.size() != m.size() {
                    continue;
                }
                if !Self::rel_plain(ctx, side, &t1.pre, &t2.pre) {
                    continue;
                }
                if !self.rel_post(ctx, side, &t1.post, &t2.post) {
                    post_failure = true;
                    continue;
                }
                let goal = GoalSpec::Or { matched: t1.id, target: t2.id };
                if let Some(w) = search.run(ctx, &t1.pre, m, dir, goal, 1)?.into_iter().next() {
                    return Ok(Outcome::Answered(Response {
                        side: side_no(side),
                        challenger: t1.id,
                        opposing: m.clone(),
                        responder: Some(t2.id),
                        silent: Some(w),
                    }));
                }
            }
        }
        let shown = self.net.format_marking(m);
        Ok(if post_failure {
            Outcome::Failed(ViolationReason::ClosureFailure, format!("post-sets of the answers to {name} from {shown} are not related"))
        } else {
            Outcome::Failed(ViolationReason::NoResponse, format!("{shown} cannot answer {name}"))
        })
    }
}

fn side_no(s: Side) -> u8 {
    match s {
        Side::Left => 1,
        Side::Right => 2,
    }
}

/// Evaluates every condition instance of `kind` for `rel`.
///
/// Budget exhaustion in the silent search is an error, never a violation.
pub fn check_relation(net: &Net, rel: &PlaceRelation, kind: EquivalenceKind) -> Result<CheckReport, CheckError> {
    check_relation_with(net, rel, kind, crate::silent::DEFAULT_NODE_BUDGET)
}

pub fn check_relation_with(net: &Net, rel: &PlaceRelation, kind: EquivalenceKind, node_budget: usize) -> Result<CheckReport, CheckError> {
    let engine = Engine::new(net, kind, CheckOptions { node_budget, ..Default::default() });
    let mut ctx = RelCtx::new(engine.index(rel));
    engine.check(&mut ctx)
}

/// Closure membership of the kind: additive for the plain kinds, d-additive
/// for the d-kinds.
pub fn closure_member(rel: &PlaceRelation, kind: EquivalenceKind, m1: &Marking, m2: &Marking) -> Option<MatchWitness> {
    if kind.is_d() {
        crate::relations::d_additive_member(rel, m1, m2)
    } else {
        crate::relations::additive_member(rel, m1, m2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Related,
    NotRelated,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Related => "related",
            Status::NotRelated => "not-related",
            Status::Unknown => "unknown",
        })
    }
}

impl FromStr for Status {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "related" => Ok(Status::Related),
            "not-related" => Ok(Status::NotRelated),
            "unknown" => Ok(Status::Unknown),
            _ => Err(format!("unknown status `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeUsed {
    Exhaustive,
    Guided,
    Verify,
    SizeCheck,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub relations_examined: u64,
    pub matchings_solved: u64,
    pub universe_size: usize,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<PlaceRelation>,
    pub mode_used: ModeUsed,
    pub stats: Stats,
    /// Why a verify did not succeed, or other remarks.
    pub note: Option<String>,
    pub violations: Vec<Violation>,
}

/// Checks `rel` and the closure membership of `(m1, m2)`. A failure is
/// reported as unknown with a note; it says nothing about other relations.
pub fn verify(net: &Net, rel: &PlaceRelation, kind: EquivalenceKind, m1: &Marking, m2: &Marking) -> Result<Verdict, CheckError> {
    let start = std::time::Instant::now();
    let report = check_relation(net, rel, kind)?;
    let member = closure_member(rel, kind, m1, m2).is_some();
    let note = match (report.ok, member) {
        (true, true) => None,
        (false, true) => Some("the relation violates the bisimulation conditions".to_string()),
        (true, false) => Some("the markings are not in the closure of the relation".to_string()),
        (false, false) => Some("the relation violates the conditions and does not relate the markings".to_string()),
    };
    Ok(Verdict {
        status: if note.is_none() { Status::Related } else { Status::Unknown },
        witness: Some(rel.clone()),
        mode_used: ModeUsed::Verify,
        stats: Stats {
            relations_examined: 1,
            matchings_solved: report.matchings_solved,
            universe_size: rel.len(),
            wall_ms: start.elapsed().as_millis() as u64,
        },
        note,
        violations: report.violations,
    })
}
