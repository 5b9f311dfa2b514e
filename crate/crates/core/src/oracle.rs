//! Interleaving and branching interleaving bisimilarity on reachability
//! graphs. Used to cross-check the place-based verdicts on bounded nets.

use std::collections::HashMap;

use crate::net::{reach_lts, Label, Lts, Marking, Net, NetError};

/// Boolean matrix over LTS states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatePairRelation {
    n: usize,
    bits: Vec<bool>,
}

impl StatePairRelation {
    fn full(n: usize) -> Self {
        StatePairRelation { n, bits: vec![true; n * n] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.n + j] = v;
    }
}

/// Coarsest strong bisimulation as a block number per state, by iterated
/// signature refinement.
pub fn strong_partition(lts: &Lts) -> Vec<usize> {
    let n = lts.states.len();
    let succ = lts.successors();
    let mut block = vec![0usize; n];
    let mut count = 1;
    loop {
        let mut ids: HashMap<(usize, Vec<(Label, usize)>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let mut sig: Vec<(Label, usize)> = succ[s].iter().map(|(l, t)| (l.clone(), block[*t])).collect();
            sig.sort();
            sig.dedup();
            let k = ids.len();
            next[s] = *ids.entry((block[s], sig)).or_insert(k);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

pub fn strong_bisim(lts: &Lts, i: usize, j: usize) -> bool {
    let b = strong_partition(lts);
    b[i] == b[j]
}

fn tau_closure(lts: &Lts) -> Vec<Vec<usize>> {
    let n = lts.states.len();
    let mut tau: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, l, b) in &lts.edges {
        if l.is_tau() {
            tau[*a].push(*b);
        }
    }
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            seen[s] = true;
            let mut out = vec![s];
            while let Some(x) = stack.pop() {
                for &y in &tau[x] {
                    if !seen[y] {
                        seen[y] = true;
                        out.push(y);
                        stack.push(y);
                    }
                }
            }
            out.sort();
            out
        })
        .collect()
}

/// Greatest semi-branching bisimulation: start from all pairs and drop
/// pairs whose moves cannot be matched until nothing changes.
pub fn branching_relation(lts: &Lts) -> StatePairRelation {
    let n = lts.states.len();
    let succ = lts.successors();
    let star = tau_closure(lts);
    let mut x = StatePairRelation::full(n);

    // can `j` answer the move i -l-> i2 (with `i` on the left)?
    let answers = |x: &StatePairRelation, flip: bool, i: usize, l: &Label, i2: usize, j: usize| -> bool {
        let rel = |a: usize, b: usize| if flip { x.get(b, a) } else { x.get(a, b) };
        star[j].iter().any(|&j1| {
            if !rel(i, j1) {
                return false;
            }
            if l.is_tau() && rel(i2, j1) {
                return true;
            }
            succ[j1].iter().any(|(l2, j2)| l2 == l && rel(i2, *j2))
        })
    };

    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if !x.get(i, j) {
                    continue;
                }
                let left_ok = succ[i].iter().all(|(l, i2)| answers(&x, false, i, l, *i2, j));
                let right_ok = left_ok && succ[j].iter().all(|(l, j2)| answers(&x, true, j, l, *j2, i));
                if !right_ok {
                    x.set(i, j, false);
                    changed = true;
                }
            }
        }
        if !changed {
            return x;
        }
    }
}

pub fn branching_bisim(lts: &Lts, i: usize, j: usize) -> bool {
    branching_relation(lts).get(i, j)
}

/// Reachability graph from both markings, with their state indices.
pub fn joint_lts(net: &Net, m1: &Marking, m2: &Marking, state_cap: usize) -> Result<(Lts, usize, usize), NetError> {
    let lts = reach_lts(net, &[m1.clone(), m2.clone()], state_cap, state_cap.saturating_mul(64))?;
    let (i, j) = (lts.initials[0], lts.initials[1]);
    Ok((lts, i, j))
}

/// Interleaving (`branching == false`) or branching interleaving
/// bisimilarity of two markings. Fails when the state cap is hit.
pub fn interleaving_equivalent(net: &Net, m1: &Marking, m2: &Marking, branching: bool, state_cap: usize) -> Result<bool, NetError> {
    let (lts, i, j) = joint_lts(net, m1, m2, state_cap)?;
    Ok(if branching { branching_bisim(&lts, i, j) } else { strong_bisim(&lts, i, j) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::NetBuilder;

    fn lts(n: usize, edges: &[(usize, &str, usize)]) -> Lts {
        Lts {
            states: (0..n).map(|_| Marking::empty()).collect(),
            edges: edges.iter().map(|&(a, l, b)| (a, Label::parse(l), b)).collect(),
            initials: vec![0],
        }
    }

    #[test]
    fn strong_distinguishes_branching_structure() {
        // a.(b + c) versus a.b + a.c
        let l = lts(7, &[(0, "a", 1), (1, "b", 2), (1, "c", 3), (4, "a", 5), (4, "a", 6), (5, "b", 2), (6, "c", 3)]);
        assert!(!strong_bisim(&l, 0, 4));
        assert!(strong_bisim(&l, 2, 3));
        assert!(strong_bisim(&l, 1, 1));
    }

    #[test]
    fn branching_ignores_inert_tau() {
        // 0 -τ-> 1 -a-> 2  versus 3 -a-> 4
        let l = lts(5, &[(0, "tau", 1), (1, "a", 2), (3, "a", 4)]);
        assert!(branching_bisim(&l, 0, 3));
        assert!(!strong_bisim(&l, 0, 3));
        // τ that discards an option is not inert
        let l = lts(6, &[(0, "a", 1), (0, "tau", 2), (2, "b", 3), (4, "a", 5), (4, "b", 5)]);
        assert!(!branching_bisim(&l, 0, 4));
    }

    #[test]
    fn fig4_style_silent_steps() {
        let mut b = NetBuilder::new("f");
        let s = b.places(&["s1", "s2", "s3", "s5"]);
        b.transition("t", Marking::singleton(s[1]), Label::Tau, Marking::singleton(s[2]));
        b.transition("u", Marking::singleton(s[3]), Label::Tau, Marking::empty());
        let net = b.build().unwrap();
        let m = |n: &str| net.marking_of(&[n]);
        assert!(interleaving_equivalent(&net, &m("s2"), &m("s5"), true, 100).unwrap());
        assert!(interleaving_equivalent(&net, &m("s1"), &m("s2"), true, 100).unwrap());
        assert!(!interleaving_equivalent(&net, &m("s1"), &m("s2"), false, 100).unwrap());
    }
}
