//! Backtracking construction of a witness relation.
//!
//! Start from a matching of the query markings, find the first violated
//! condition instance, and branch over the pair sets that would discharge it.
//! A relation that passes every condition is returned; running out of
//! choices or budget yields nothing, which the caller reports as unknown.

use std::collections::{BTreeSet, HashSet};

use super::{CheckError, CheckOptions, EquivalenceKind, Engine, RelCtx, Stats, Violation};
use crate::net::{Marking, Net};
use crate::relations::{matching::hopcroft_karp, PlaceOrTheta, PlaceRelation, RelIndex, Side};
use crate::silent::{Direction, GoalSpec, Search};

type Pair = (PlaceOrTheta, PlaceOrTheta);

const SEED_LIMIT: usize = 64;
const CHOICE_LIMIT: usize = 16;
const ENUM_STEPS: usize = 20_000;

/// Pair sets associating `left` with `right`, all pairs drawn from `allowed`.
/// With `d` set, tokens may be associated with θ.
fn assignments(left: &Marking, right: &Marking, allowed: &dyn Fn(Pair) -> bool, d: bool, limit: usize) -> Vec<BTreeSet<Pair>> {
    struct St<'a> {
        left: Vec<PlaceOrTheta>,
        allowed: &'a dyn Fn(Pair) -> bool,
        d: bool,
        limit: usize,
        steps: usize,
        out: BTreeSet<BTreeSet<Pair>>,
    }
    fn rec(st: &mut St, i: usize, remaining: &mut Vec<PlaceOrTheta>, cur: &mut Vec<Pair>) {
        st.steps += 1;
        if st.out.len() >= st.limit || st.steps > ENUM_STEPS {
            return;
        }
        if i == st.left.len() {
            if remaining.iter().all(|&b| st.d && (st.allowed)((PlaceOrTheta::Theta, b))) {
                let mut set: BTreeSet<Pair> = cur.iter().copied().collect();
                set.extend(remaining.iter().map(|&b| (PlaceOrTheta::Theta, b)));
                st.out.insert(set);
            }
            return;
        }
        let a = st.left[i];
        let mut tried = BTreeSet::new();
        for k in 0..remaining.len() {
            let b = remaining[k];
            if !tried.insert(b) || !(st.allowed)((a, b)) {
                continue;
            }
            remaining.remove(k);
            cur.push((a, b));
            rec(st, i + 1, remaining, cur);
            cur.pop();
            remaining.insert(k, b);
        }
        if st.d && (st.allowed)((a, PlaceOrTheta::Theta)) {
            cur.push((a, PlaceOrTheta::Theta));
            rec(st, i + 1, remaining, cur);
            cur.pop();
        }
    }
    let mut st = St {
        left: left.tokens().into_iter().map(PlaceOrTheta::Place).collect(),
        allowed,
        d,
        limit,
        steps: 0,
        out: BTreeSet::new(),
    };
    let mut remaining: Vec<PlaceOrTheta> = right.tokens().into_iter().map(PlaceOrTheta::Place).collect();
    rec(&mut st, 0, &mut remaining, &mut Vec::new());
    st.out.into_iter().collect()
}

/// One plain matching of `a` with `b` using pairs of `have` where possible
/// and pairs of `extra` otherwise.
fn preferred_matching(have: &RelIndex, extra: &RelIndex, a: &Marking, b: &Marking) -> Option<Vec<Pair>> {
    let (l, r) = (a.tokens(), b.tokens());
    if l.len() != r.len() {
        return None;
    }
    let adj: Vec<Vec<u32>> = l
        .iter()
        .map(|&p| {
            let mut first: Vec<u32> = Vec::new();
            let mut second: Vec<u32> = Vec::new();
            for (j, &q) in r.iter().enumerate() {
                if have.has(p.into(), q.into()) {
                    first.push(j as u32);
                } else if extra.has(p.into(), q.into()) {
                    second.push(j as u32);
                }
            }
            first.extend(second);
            first
        })
        .collect();
    let m = hopcroft_karp(&adj, r.len());
    m.iter()
        .zip(&l)
        .map(|(j, &p)| j.map(|j| (PlaceOrTheta::Place(p), PlaceOrTheta::Place(r[j as usize]))))
        .collect()
}

struct Guide<'a> {
    engine: Engine<'a>,
    universe: Vec<Pair>,
    uidx: RelIndex,
    budget: u64,
    examined: u64,
    matchings: u64,
    seen: HashSet<BTreeSet<Pair>>,
}

impl Guide<'_> {
    fn index(&self, rel: &BTreeSet<Pair>) -> RelIndex {
        let mut idx = RelIndex::new(self.engine.net.place_count());
        for &(a, b) in rel {
            idx.set(a, b);
        }
        idx
    }

    fn first_violation(&mut self, rel: &BTreeSet<Pair>) -> Result<Option<Violation>, CheckError> {
        self.examined += 1;
        let mut ctx = RelCtx::new(self.index(rel));
        let rep = self.engine.check(&mut ctx)?;
        self.matchings += ctx.matchings;
        Ok(rep.violations.into_iter().next())
    }

    fn orient(side: Side, challenger: &Marking, responder: &Marking) -> (Marking, Marking) {
        match side {
            Side::Left => (challenger.clone(), responder.clone()),
            Side::Right => (responder.clone(), challenger.clone()),
        }
    }

    fn post_choices(&self, side: Side, p1: &Marking, p2: &Marking) -> Vec<BTreeSet<Pair>> {
        let (a, b) = Self::orient(side, p1, p2);
        let u = &self.uidx;
        let allowed = |(x, y): Pair| u.has(x, y);
        assignments(&a, &b, &allowed, self.engine.kind.is_d(), CHOICE_LIMIT)
    }

    /// Pair sets that would answer the violated instance.
    fn repairs(&mut self, rel: &BTreeSet<Pair>, v: &Violation) -> Result<Vec<BTreeSet<Pair>>, CheckError> {
        let net = self.engine.net;
        let t1 = net.transition(v.transition);
        let m = &v.opposing;
        let side = if v.side == 1 { Side::Left } else { Side::Right };
        if m.size() != t1.pre.size() {
            return Ok(Vec::new());
        }
        let have = self.index(rel).bar();
        let mut widened = self.index(rel);
        for &(a, b) in &self.universe {
            widened.set(a, b);
        }
        let extra = widened.bar();
        let mut out: Vec<BTreeSet<Pair>> = Vec::new();

        if !self.engine.kind.is_branching() {
            for t2 in net.transitions().iter().filter(|t2| &t2.pre == m && t2.label == t1.label) {
                out.extend(self.post_choices(side, &t1.post, &t2.post));
            }
        } else {
            let dir = match side {
                Side::Left => Direction::Psi,
                Side::Right => Direction::Phi,
            };
            // intermediate markings must be related to the anchor
            let pre_pairs = |ms: &[Marking]| -> Option<BTreeSet<Pair>> {
                let mut acc = BTreeSet::new();
                for mi in ms {
                    let (a, b) = Self::orient(side, &t1.pre, mi);
                    acc.extend(preferred_matching(&have, &extra, &a, &b)?);
                }
                Some(acc)
            };
            let search = Search { net, graph: &self.engine.graph, budget: self.engine.opts.node_budget };
            let mut wide_ctx = RelCtx::new(widened.clone());
            if t1.is_tau_sequential() {
                let ws = search.run(&mut wide_ctx, &t1.pre, m, dir, GoalSpec::Either { transition: t1.id }, CHOICE_LIMIT)?;
                for w in ws {
                    if let Some(mut acc) = pre_pairs(&w.intermediates) {
                        let (a, b) = Self::orient(side, &t1.post, &w.post());
                        if let Some(ps) = preferred_matching(&have, &extra, &a, &b) {
                            acc.extend(ps);
                            out.push(acc);
                        }
                    }
                }
            }
            for t2 in net.transitions() {
                if t2.label != t1.label || t2.pre.size() != m.size() {
                    continue;
                }
                let (a, b) = Self::orient(side, &t1.pre, &t2.pre);
                if !wide_ctx.plain(&a, &b) {
                    continue;
                }
                let goal = GoalSpec::Or { matched: t1.id, target: t2.id };
                let Some(w) = search.run(&mut wide_ctx, &t1.pre, m, dir, goal, 1)?.into_iter().next() else {
                    continue;
                };
                let Some(base) = pre_pairs(&w.intermediates) else { continue };
                for post in self.post_choices(side, &t1.post, &t2.post) {
                    let mut acc = base.clone();
                    acc.extend(post);
                    out.push(acc);
                }
            }
        }
        let mut fresh: Vec<BTreeSet<Pair>> = out
            .into_iter()
            .map(|s| s.into_iter().filter(|p| !rel.contains(p)).collect::<BTreeSet<_>>())
            .filter(|s| !s.is_empty())
            .collect();
        fresh.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        fresh.dedup();
        Ok(fresh)
    }

    fn dfs(&mut self, rel: BTreeSet<Pair>) -> Result<Option<BTreeSet<Pair>>, CheckError> {
        if !self.seen.insert(rel.clone()) || self.examined >= self.budget {
            return Ok(None);
        }
        let Some(v) = self.first_violation(&rel)? else {
            return Ok(Some(rel));
        };
        for extra in self.repairs(&rel, &v)? {
            let mut next = rel.clone();
            next.extend(extra);
            if let Some(found) = self.dfs(next)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
}

pub(super) fn search(
    net: &Net,
    m1: &Marking,
    m2: &Marking,
    kind: EquivalenceKind,
    universe: &[Pair],
    caps: &super::Caps,
    stats: &mut Stats,
) -> Result<Option<PlaceRelation>, CheckError> {
    let opts = CheckOptions { stop_at_first: true, record: false, node_budget: caps.node_budget };
    let mut uidx = RelIndex::new(net.place_count());
    for &(a, b) in universe {
        uidx.set(a, b);
    }
    let mut g = Guide {
        engine: Engine::new(net, kind, opts),
        universe: universe.to_vec(),
        uidx,
        budget: caps.guided_budget,
        examined: 0,
        matchings: 0,
        seen: HashSet::new(),
    };
    let seeds = {
        let u = &g.uidx;
        let allowed = |(x, y): Pair| u.has(x, y);
        let mut s = assignments(m1, m2, &allowed, kind.is_d(), SEED_LIMIT);
        s.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        s
    };
    let mut found = None;
    for seed in seeds {
        if let Some(r) = g.dfs(seed)? {
            found = Some(r);
            break;
        }
    }
    stats.relations_examined = g.examined;
    stats.matchings_solved = g.matchings;
    Ok(found.map(|r| PlaceRelation::from_pairs(r).expect("universe has no (θ, θ)")))
}
