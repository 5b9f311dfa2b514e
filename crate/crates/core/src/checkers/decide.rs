use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{guided, CheckError, CheckOptions, EquivalenceKind, Engine, ModeUsed, RelCtx, Stats, Status, Verdict};
use crate::net::{Marking, Net};
use crate::relations::{member_d, member_plain, PlaceOrTheta, PlaceRelation, RelIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Guided,
    Auto,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "guided" => Ok(Mode::Guided),
            "auto" => Ok(Mode::Auto),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Guided => "guided",
            Mode::Auto => "auto",
        })
    }
}

/// Resource limits for [`decide`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Auto mode enumerates exhaustively up to this many candidate pairs.
    pub max_pairs: usize,
    /// Node budget of each silent-move search.
    pub node_budget: usize,
    /// Relations the guided search may examine before giving up.
    pub guided_budget: u64,
    /// Worker threads for exhaustive enumeration; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// Enumerate strictly in order on one thread.
    pub deterministic: bool,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_pairs: 22,
            node_budget: crate::silent::DEFAULT_NODE_BUDGET,
            guided_budget: 20_000,
            threads: None,
            deterministic: false,
        }
    }
}

/// Candidate pairs for a query. When the two markings live in disjoint sets
/// of weakly connected components only pairs across those sets are needed;
/// otherwise all pairs over the touched components. The d-kinds add θ on
/// both sides.
pub fn pair_universe(net: &Net, m1: &Marking, m2: &Marking, d: bool) -> Vec<(PlaceOrTheta, PlaceOrTheta)> {
    let comp = net.components();
    let c1: BTreeSet<usize> = m1.support().map(|p| comp[p.index()]).collect();
    let c2: BTreeSet<usize> = m2.support().map(|p| comp[p.index()]).collect();
    let places_in = |cs: &BTreeSet<usize>| -> Vec<PlaceOrTheta> {
        net.places().filter(|p| cs.contains(&comp[p.index()])).map(PlaceOrTheta::Place).collect()
    };
    let (mut left, mut right) = if c1.is_disjoint(&c2) {
        (places_in(&c1), places_in(&c2))
    } else {
        let all: BTreeSet<usize> = c1.union(&c2).copied().collect();
        (places_in(&all), places_in(&all))
    };
    if d {
        left.insert(0, PlaceOrTheta::Theta);
        right.insert(0, PlaceOrTheta::Theta);
    }
    let mut out = Vec::new();
    for &a in &left {
        for &b in &right {
            if !(a.is_theta() && b.is_theta()) {
                out.push((a, b));
            }
        }
    }
    out
}

fn relation_of(universe: &[(PlaceOrTheta, PlaceOrTheta)], mask: u64) -> PlaceRelation {
    PlaceRelation::from_pairs(universe.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p))
        .expect("universe has no (θ, θ)")
}

/// Decides whether `m1` and `m2` are related by some bisimulation of `kind`.
///
/// Exhaustive mode lists subsets of the pair universe by size, then
/// lexicographically, so a related verdict carries a smallest witness.
/// Guided mode never answers not-related.
pub fn decide(net: &Net, m1: &Marking, m2: &Marking, kind: EquivalenceKind, mode: Mode, caps: &Caps) -> Result<Verdict, CheckError> {
    let start = Instant::now();
    let universe = pair_universe(net, m1, m2, kind.is_d());
    let mut stats = Stats { universe_size: universe.len(), ..Default::default() };
    if !kind.is_d() && m1.size() != m2.size() {
        stats.wall_ms = start.elapsed().as_millis() as u64;
        return Ok(Verdict {
            status: Status::NotRelated,
            witness: None,
            mode_used: ModeUsed::SizeCheck,
            stats,
            note: Some("markings differ in size".into()),
            violations: Vec::new(),
        });
    }
    let exhaustive = match mode {
        Mode::Exhaustive => true,
        Mode::Guided => false,
        Mode::Auto => universe.len() <= caps.max_pairs,
    };
    let (status, witness, mode_used) = if exhaustive {
        let found = exhaustive_search(net, m1, m2, kind, &universe, caps, &mut stats)?;
        match found {
            Some(mask) => (Status::Related, Some(relation_of(&universe, mask)), ModeUsed::Exhaustive),
            None => (Status::NotRelated, None, ModeUsed::Exhaustive),
        }
    } else {
        match guided::search(net, m1, m2, kind, &universe, caps, &mut stats)? {
            Some(r) => (Status::Related, Some(r), ModeUsed::Guided),
            None => (Status::Unknown, None, ModeUsed::Guided),
        }
    };
    if let Some(r) = &witness {
        // independent re-check of whatever the search produced
        let rep = super::check_relation_with(net, r, kind, caps.node_budget)?;
        if !rep.ok || super::closure_member(r, kind, m1, m2).is_none() {
            return Err(CheckError::InvalidWitness);
        }
    }
    stats.wall_ms = start.elapsed().as_millis() as u64;
    Ok(Verdict {
        status,
        witness,
        mode_used,
        stats,
        note: (status == Status::Unknown).then(|| "guided search found no witness".to_string()),
        violations: Vec::new(),
    })
}

struct Tester<'a> {
    engine: Engine<'a>,
    slots: Vec<(PlaceOrTheta, PlaceOrTheta)>,
    m1: &'a Marking,
    m2: &'a Marking,
    examined: AtomicU64,
    matchings: AtomicU64,
}

impl Tester<'_> {
    fn test(&self, mask: u64) -> Result<bool, CheckError> {
        self.examined.fetch_add(1, Ordering::Relaxed);
        let mut idx = RelIndex::new(self.engine.net.place_count());
        for (i, &(a, b)) in self.slots.iter().enumerate() {
            if mask >> i & 1 == 1 {
                idx.set(a, b);
            }
        }
        let member = if self.engine.kind.is_d() {
            member_d(&idx, self.m1, self.m2, false).is_some()
        } else {
            member_plain(&idx, self.m1, self.m2, false).is_some()
        };
        self.matchings.fetch_add(1, Ordering::Relaxed);
        if !member {
            return Ok(false);
        }
        let mut ctx = RelCtx::new(idx);
        let rep = self.engine.check(&mut ctx)?;
        self.matchings.fetch_add(ctx.matchings, Ordering::Relaxed);
        Ok(rep.ok)
    }
}

// Combinations of `k` out of `n` in lexicographic order of index tuples.
struct Combos {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combos {
    fn new(n: usize, k: usize) -> Self {
        Combos { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combos {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        let mask = self.idx.iter().fold(0u64, |m, &i| m | 1 << i);
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(mask)
    }
}

const CHUNK: usize = 1 << 13;

fn exhaustive_search(
    net: &Net,
    m1: &Marking,
    m2: &Marking,
    kind: EquivalenceKind,
    universe: &[(PlaceOrTheta, PlaceOrTheta)],
    caps: &Caps,
    stats: &mut Stats,
) -> Result<Option<u64>, CheckError> {
    if universe.len() > 63 {
        return Err(CheckError::UniverseTooLarge(universe.len()));
    }
    let opts = CheckOptions { stop_at_first: true, record: false, node_budget: caps.node_budget };
    let tester = Tester {
        engine: Engine::new(net, kind, opts),
        slots: universe.to_vec(),
        m1,
        m2,
        examined: AtomicU64::new(0),
        matchings: AtomicU64::new(0),
    };
    let threads = caps.threads.unwrap_or_else(rayon::current_num_threads);
    let parallel = !caps.deterministic && threads > 1;
    let pool = if parallel {
        Some(rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool"))
    } else {
        None
    };
    let n = universe.len();
    let mut result = None;
    'levels: for k in 0..=n {
        let mut combos = Combos::new(n, k);
        loop {
            let chunk: Vec<u64> = combos.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                break;
            }
            let hit = match &pool {
                None => {
                    let mut hit = None;
                    for &mask in &chunk {
                        if tester.test(mask)? {
                            hit = Some(mask);
                            break;
                        }
                    }
                    hit
                }
                Some(pool) => pool
                    .install(|| {
                        chunk.par_iter().find_map_first(|&mask| match tester.test(mask) {
                            Ok(true) => Some(Ok(mask)),
                            Ok(false) => None,
                            Err(e) => Some(Err(e)),
                        })
                    })
                    .transpose()?,
            };
            if let Some(mask) = hit {
                result = Some(mask);
                break 'levels;
            }
        }
    }
    stats.relations_examined = tester.examined.load(Ordering::Relaxed);
    stats.matchings_solved = tester.matchings.load(Ordering::Relaxed);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Label, NetBuilder};

    #[test]
    fn combos_are_lexicographic() {
        let v: Vec<u64> = Combos::new(4, 2).collect();
        assert_eq!(v, vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
        assert_eq!(Combos::new(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(Combos::new(3, 3).collect::<Vec<_>>(), vec![0b111]);
        let total: usize = (0..=6).map(|k| Combos::new(6, k).count()).sum();
        assert_eq!(total, 64);
    }

    #[test]
    fn universe_uses_components() {
        let mut b = NetBuilder::new("u");
        let s = b.places(&["a", "b", "c", "d", "e"]);
        b.transition("t", Marking::singleton(s[0]), Label::Tau, Marking::singleton(s[1]));
        b.transition("u", Marking::singleton(s[2]), Label::Tau, Marking::from_places([s[3], s[4]]).unwrap());
        let net = b.build().unwrap();
        let (ma, mc) = (net.marking_of(&["a"]), net.marking_of(&["c"]));
        assert_eq!(pair_universe(&net, &ma, &mc, false).len(), 2 * 3);
        assert_eq!(pair_universe(&net, &ma, &mc, true).len(), 3 * 4 - 1);
        assert_eq!(pair_universe(&net, &ma, &ma, false).len(), 4);
        let both = net.marking_of(&["a", "c"]);
        assert_eq!(pair_universe(&net, &both, &ma, false).len(), 25);
    }
}
