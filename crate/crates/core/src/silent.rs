//! τ-sequential moves, idling, and the search for silent responses whose
//! intermediate markings stay related to an anchor.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{Marking, Net, PlaceId, Transition, TransitionId};
use crate::relations::{member_plain, MatchWitness, PlaceRelation, RelIndex};

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SilentStep {
    /// The fictitious idling step i(s).
    Idle(PlaceId),
    Move(TransitionId),
}

/// A τ-k-sequential response: one block per token, executed in order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SilentWitness {
    pub blocks: Vec<Vec<SilentStep>>,
    pub source_matching: MatchWitness,
    /// m0 (the pre-set), then the marking after every step.
    pub intermediates: Vec<Marking>,
}

impl SilentWitness {
    pub fn pre(&self) -> Marking {
        self.intermediates.first().cloned().unwrap_or_default()
    }

    pub fn post(&self) -> Marking {
        self.intermediates.last().cloned().unwrap_or_default()
    }

    pub fn step_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// (anchor, mᵢ) in the closure.
    Psi,
    /// (mᵢ, anchor) in the closure.
    Phi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoalSpec {
    /// Reply to the τ-sequential `transition` by silent moves alone.
    Either { transition: TransitionId },
    /// Reach exactly the pre-set of `target`, which then answers `matched`.
    Or { matched: TransitionId, target: TransitionId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SilentError {
    #[error("silent search exceeded its node budget of {0}")]
    BudgetExhausted(usize),
    #[error("malformed silent witness: {0}")]
    Malformed(String),
}

pub fn is_tau_sequential(net: &Net, t: TransitionId) -> bool {
    net.transition(t).is_tau_sequential()
}

/// Place graph of the τ-sequential transitions. Idling is not represented.
#[derive(Clone, Debug)]
pub struct SilentGraph {
    succ: Vec<Vec<(TransitionId, PlaceId)>>,
}

impl SilentGraph {
    pub fn edges(&self) -> impl Iterator<Item = (PlaceId, TransitionId, PlaceId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(p, v)| v.iter().map(move |&(t, q)| (PlaceId(p as u32), t, q)))
    }

    pub fn successors(&self, p: PlaceId) -> &[(TransitionId, PlaceId)] {
        &self.succ[p.index()]
    }
}

pub fn silent_graph(net: &Net) -> SilentGraph {
    let mut succ = vec![Vec::new(); net.place_count()];
    for t in net.transitions().iter().filter(|t| t.is_tau_sequential()) {
        let from = t.pre.support().next().expect("size one");
        let to = t.post.support().next().expect("size one");
        succ[from.index()].push((t.id, to));
    }
    SilentGraph { succ }
}

/// Closure membership oracle used by the search; lets callers plug in caching.
pub(crate) trait Membership {
    fn member(&mut self, a: &Marking, b: &Marking) -> bool;
    fn witness(&mut self, a: &Marking, b: &Marking) -> Option<MatchWitness>;
}

pub(crate) struct PlainMembership {
    idx: RelIndex,
}

impl PlainMembership {
    pub(crate) fn new(rel: &PlaceRelation, n_places: usize) -> Self {
        PlainMembership { idx: RelIndex::from_relation(rel, n_places).bar() }
    }
}

impl Membership for PlainMembership {
    fn member(&mut self, a: &Marking, b: &Marking) -> bool {
        member_plain(&self.idx, a, b, false).is_some()
    }
    fn witness(&mut self, a: &Marking, b: &Marking) -> Option<MatchWitness> {
        member_plain(&self.idx, a, b, true)
    }
}

fn directed(mem: &mut dyn Membership, dir: Direction, anchor: &Marking, m: &Marking) -> bool {
    match dir {
        Direction::Psi => mem.member(anchor, m),
        Direction::Phi => mem.member(m, anchor),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Node {
    done: Vec<PlaceId>,
    /// current position and places visited by the active block
    active: Option<(PlaceId, Vec<PlaceId>)>,
    pending: Vec<PlaceId>,
}

impl Node {
    fn marking(&self) -> Marking {
        let mut all = self.done.clone();
        all.extend(self.pending.iter().copied());
        if let Some((p, _)) = &self.active {
            all.push(*p);
        }
        Marking::from_places(all).expect("token count fits")
    }
}

#[derive(Clone, Copy, Debug)]
enum Action {
    Root,
    Activate(PlaceId),
    Step(TransitionId, PlaceId),
    Finish,
}

pub(crate) struct Search<'a> {
    pub net: &'a Net,
    pub graph: &'a SilentGraph,
    pub budget: usize,
}

impl Search<'_> {
    fn goal_holds(&self, mem: &mut dyn Membership, dir: Direction, anchor: &Marking, goal: GoalSpec, fin: &Marking) -> bool {
        match goal {
            GoalSpec::Either { transition } => {
                let t = self.net.transition(transition);
                directed(mem, dir, anchor, fin) && directed(mem, dir, &t.post, fin)
            }
            GoalSpec::Or { target, .. } => &self.net.transition(target).pre == fin,
        }
    }

    /// Breadth-first search over block schedules. Returns up to `limit`
    /// witnesses with pairwise distinct final markings.
    pub(crate) fn run(
        &self,
        mem: &mut dyn Membership,
        anchor: &Marking,
        start: &Marking,
        dir: Direction,
        goal: GoalSpec,
        limit: usize,
    ) -> Result<Vec<SilentWitness>, SilentError> {
        if let GoalSpec::Either { transition } = goal {
            if !self.net.transition(transition).is_tau_sequential() {
                return Err(SilentError::Malformed("either-goal on a transition that is not τ-sequential".into()));
            }
        }
        let mut found = Vec::new();
        if start.is_empty() {
            if anchor.is_empty() && self.goal_holds(mem, dir, anchor, goal, start) {
                found.push(SilentWitness { intermediates: vec![Marking::empty()], ..Default::default() });
            }
            return Ok(found);
        }
        if !directed(mem, dir, anchor, start) {
            return Ok(found);
        }
        let source = match dir {
            Direction::Psi => mem.witness(anchor, start),
            Direction::Phi => mem.witness(start, anchor),
        }
        .unwrap_or_default();

        let root = Node { done: Vec::new(), active: None, pending: start.tokens() };
        let mut nodes: Vec<(Node, usize, Action)> = vec![(root.clone(), 0, Action::Root)];
        let mut seen: HashMap<Node, usize> = HashMap::from([(root, 0)]);
        let mut finals: Vec<Marking> = Vec::new();
        let mut queue = VecDeque::from([0usize]);

        while let Some(i) = queue.pop_front() {
            let node = nodes[i].0.clone();
            let mut succ: Vec<(Node, Action, bool)> = Vec::new();
            match &node.active {
                None => {
                    let mut last = None;
                    for (k, &p) in node.pending.iter().enumerate() {
                        if last == Some(p) {
                            continue;
                        }
                        last = Some(p);
                        let mut pending = node.pending.clone();
                        pending.remove(k);
                        succ.push((Node { done: node.done.clone(), active: Some((p, vec![p])), pending }, Action::Activate(p), true));
                    }
                }
                Some((cur, visited)) => {
                    let mut done = node.done.clone();
                    let pos = done.binary_search(cur).unwrap_or_else(|e| e);
                    done.insert(pos, *cur);
                    succ.push((Node { done, active: None, pending: node.pending.clone() }, Action::Finish, true));
                    let m = node.marking();
                    for &(t, q) in self.graph.successors(*cur) {
                        if visited.contains(&q) {
                            continue;
                        }
                        let next_m = m.move_token(*cur, q);
                        let ok = directed(mem, dir, anchor, &next_m);
                        if !ok && !node.pending.is_empty() {
                            continue;
                        }
                        let mut vis = visited.clone();
                        let pos = vis.binary_search(&q).unwrap_or_else(|e| e);
                        vis.insert(pos, q);
                        succ.push((
                            Node { done: node.done.clone(), active: Some((q, vis)), pending: node.pending.clone() },
                            Action::Step(t, q),
                            ok,
                        ));
                    }
                }
            }
            for (next, action, related) in succ {
                let complete = next.pending.is_empty();
                if !related {
                    // only legal as the very last marking of the sequence
                    let (cur, _) = next.active.clone().expect("step leaves block active");
                    let mut done = next.done.clone();
                    done.push(cur);
                    done.sort();
                    let fin_node = Node { done, active: None, pending: Vec::new() };
                    let fin = fin_node.marking();
                    if !finals.contains(&fin) && self.goal_holds(mem, dir, anchor, goal, &fin) {
                        nodes.push((next, i, action));
                        let j = nodes.len() - 1;
                        nodes.push((fin_node, j, Action::Finish));
                        finals.push(fin);
                        found.push(self.rebuild(&nodes, nodes.len() - 1, start, source.clone()));
                        if found.len() >= limit {
                            return Ok(found);
                        }
                    }
                    continue;
                }
                if seen.contains_key(&next) {
                    continue;
                }
                if nodes.len() >= self.budget {
                    return Err(SilentError::BudgetExhausted(self.budget));
                }
                let is_final = complete && next.active.is_none();
                nodes.push((next.clone(), i, action));
                let j = nodes.len() - 1;
                seen.insert(next.clone(), j);
                if is_final {
                    let fin = next.marking();
                    if !finals.contains(&fin) && self.goal_holds(mem, dir, anchor, goal, &fin) {
                        finals.push(fin);
                        found.push(self.rebuild(&nodes, j, start, source.clone()));
                        if found.len() >= limit {
                            return Ok(found);
                        }
                    }
                } else {
                    queue.push_back(j);
                }
            }
        }
        Ok(found)
    }

    fn rebuild(&self, nodes: &[(Node, usize, Action)], mut i: usize, start: &Marking, source: MatchWitness) -> SilentWitness {
        let mut actions = Vec::new();
        while i != 0 {
            actions.push(nodes[i].2);
            i = nodes[i].1;
        }
        actions.reverse();
        let mut blocks: Vec<Vec<SilentStep>> = Vec::new();
        let mut intermediates = vec![start.clone()];
        let mut cur = start.clone();
        let mut block_start = None;
        let mut pos = None;
        for a in actions {
            match a {
                Action::Root => {}
                Action::Activate(p) => {
                    blocks.push(Vec::new());
                    block_start = Some(p);
                    pos = Some(p);
                }
                Action::Step(t, q) => {
                    cur = cur.move_token(pos.expect("active"), q);
                    intermediates.push(cur.clone());
                    blocks.last_mut().expect("active").push(SilentStep::Move(t));
                    pos = Some(q);
                }
                Action::Finish => {
                    let b = blocks.last_mut().expect("active");
                    if b.is_empty() {
                        b.push(SilentStep::Idle(block_start.expect("active")));
                        intermediates.push(cur.clone());
                    }
                }
            }
        }
        SilentWitness { blocks, source_matching: source, intermediates }
    }
}

/// Finds an acyclic τ-sequential σ with •σ = `start`, every marking before
/// the last related to `anchor` in the given direction, and the goal met.
/// `None` means no such σ exists; running out of budget is an error.
pub fn find_silent_response(
    net: &Net,
    rel: &PlaceRelation,
    anchor: &Marking,
    start: &Marking,
    dir: Direction,
    goal: GoalSpec,
    budget: usize,
) -> Result<Option<SilentWitness>, SilentError> {
    let graph = silent_graph(net);
    let mut mem = PlainMembership::new(rel, net.place_count());
    let search = Search { net, graph: &graph, budget };
    Ok(search.run(&mut mem, anchor, start, dir, goal, 1)?.into_iter().next())
}

/// Checks that `w` is a well formed τ-k-sequential sequence of acyclic
/// blocks and recomputes its intermediate markings.
pub fn validate_witness(net: &Net, w: &SilentWitness) -> Result<Vec<Marking>, SilentError> {
    let bad = |s: &str| Err(SilentError::Malformed(s.to_string()));
    if w.blocks.is_empty() {
        return match w.intermediates.as_slice() {
            [] => Ok(vec![Marking::empty()]),
            [m] if m.is_empty() => Ok(vec![Marking::empty()]),
            _ => bad("empty sequence must start from θ"),
        };
    }
    let mut starts = Vec::new();
    let mut paths = Vec::new();
    for b in &w.blocks {
        match b.as_slice() {
            [] => return bad("empty block"),
            [SilentStep::Idle(p)] => {
                if p.index() >= net.place_count() {
                    return bad("idle on unknown place");
                }
                starts.push(*p);
                paths.push(vec![*p]);
            }
            steps => {
                let mut path: Vec<PlaceId> = Vec::new();
                for s in steps {
                    let SilentStep::Move(t) = s else {
                        return bad("idle step inside a longer block");
                    };
                    let Some(t) = net.transitions().get(t.index()) else {
                        return bad("unknown transition");
                    };
                    if !t.is_tau_sequential() {
                        return bad("step not τ-sequential");
                    }
                    let (from, to) = ends(t);
                    match path.last() {
                        None => path.push(from),
                        Some(&p) if p == from => {}
                        Some(_) => return bad("steps do not chain"),
                    }
                    path.push(to);
                }
                let n = path.len() - 1;
                for i in 1..=n {
                    for j in (i + 1)..=n {
                        if path[i] == path[j] {
                            return bad("block revisits a place");
                        }
                    }
                    if i < n && path[i] == path[0] {
                        return bad("block revisits its start");
                    }
                }
                starts.push(path[0]);
                paths.push(path);
            }
        }
    }
    let mut cur = Marking::from_places(starts).map_err(|e| SilentError::Malformed(e.to_string()))?;
    let mut ms = vec![cur.clone()];
    for path in &paths {
        if path.len() == 1 {
            ms.push(cur.clone());
        }
        for w in path.windows(2) {
            cur = cur.move_token(w[0], w[1]);
            ms.push(cur.clone());
        }
    }
    if !w.intermediates.is_empty() && w.intermediates != ms {
        return bad("intermediate markings do not match the steps");
    }
    Ok(ms)
}

fn ends(t: &Transition) -> (PlaceId, PlaceId) {
    (t.pre.support().next().expect("size one"), t.post.support().next().expect("size one"))
}

/// Ψ (or Φ): every marking m₀..mₙ₋₁ of the witness is related to `anchor`.
pub fn psi_holds(net: &Net, anchor: &Marking, w: &SilentWitness, rel: &PlaceRelation, dir: Direction) -> Result<bool, SilentError> {
    let ms = validate_witness(net, w)?;
    let mut mem = PlainMembership::new(rel, net.place_count());
    Ok(ms[..ms.len() - 1].iter().all(|m| directed(&mut mem, dir, anchor, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Label, NetBuilder};

    fn fig4() -> Net {
        let mut b = NetBuilder::new("tau-fig2");
        let s = b.places(&["s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8"]);
        let one = Marking::singleton;
        b.transition("t2", one(s[1]), Label::Tau, one(s[2]));
        b.transition("t4", one(s[3]), Label::Tau, one(s[3]));
        b.transition("t5", one(s[4]), Label::Tau, Marking::empty());
        b.transition("t6", one(s[5]), Label::Tau, Marking::from_places([s[6], s[7]]).unwrap());
        b.build().unwrap()
    }

    #[test]
    fn tau_sequential_classification() {
        let net = fig4();
        assert!(is_tau_sequential(&net, TransitionId(0)));
        assert!(is_tau_sequential(&net, TransitionId(1)));
        assert!(!is_tau_sequential(&net, TransitionId(2)));
        assert!(!is_tau_sequential(&net, TransitionId(3)));
        let g = silent_graph(&net);
        let e: Vec<_> = g.edges().map(|(a, _, b)| (net.place_name(a).to_string(), net.place_name(b).to_string())).collect();
        assert_eq!(e, vec![("s2".into(), "s3".into()), ("s4".into(), "s4".into())]);
    }

    #[test]
    fn idle_answers_a_silent_move() {
        let net = fig4();
        let r = PlaceRelation::named(&net, &[("s1", "s2"), ("s1", "s3")]);
        // s2 -τ-> s3 on the right, s1 idles on the left
        let w = find_silent_response(
            &net,
            &r,
            &net.marking_of(&["s2"]),
            &net.marking_of(&["s1"]),
            Direction::Phi,
            GoalSpec::Either { transition: TransitionId(0) },
            DEFAULT_NODE_BUDGET,
        )
        .unwrap()
        .unwrap();
        assert_eq!(w.blocks, vec![vec![SilentStep::Idle(net.place("s1").unwrap())]]);
        assert!(psi_holds(&net, &net.marking_of(&["s2"]), &w, &r, Direction::Phi).unwrap());
    }

    #[test]
    fn empty_witness_and_malformed_witness() {
        let net = fig4();
        let r = PlaceRelation::new();
        let eps = SilentWitness { intermediates: vec![Marking::empty()], ..Default::default() };
        assert!(psi_holds(&net, &Marking::empty(), &eps, &r, Direction::Psi).unwrap());
        let bad = SilentWitness { blocks: vec![vec![SilentStep::Move(TransitionId(2))]], ..Default::default() };
        assert!(matches!(
            psi_holds(&net, &net.marking_of(&["s2"]), &bad, &r, Direction::Psi),
            Err(SilentError::Malformed(_))
        ));
        let looped = SilentWitness {
            blocks: vec![vec![SilentStep::Move(TransitionId(1)), SilentStep::Move(TransitionId(1))]],
            ..Default::default()
        };
        assert!(validate_witness(&net, &looped).is_err());
        let idles = SilentWitness {
            blocks: vec![vec![SilentStep::Idle(PlaceId(0)), SilentStep::Idle(PlaceId(0))]],
            ..Default::default()
        };
        assert!(validate_witness(&net, &idles).is_err());
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let net = fig4();
        let r = PlaceRelation::named(&net, &[("s1", "s2"), ("s1", "s3")]);
        let res = find_silent_response(
            &net,
            &r,
            &net.marking_of(&["s1"]),
            &net.marking_of(&["s2"]),
            Direction::Psi,
            GoalSpec::Or { matched: TransitionId(0), target: TransitionId(2) },
            1,
        );
        assert_eq!(res, Err(SilentError::BudgetExhausted(1)));
    }
}
