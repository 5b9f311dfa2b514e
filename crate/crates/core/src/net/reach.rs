use std::collections::{HashMap, HashSet, VecDeque};

use super::{Label, Marking, Net, NetError};

/// Reachability graph of a net from a list of initial markings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    pub states: Vec<Marking>,
    pub edges: Vec<(usize, Label, usize)>,
    pub initials: Vec<usize>,
}

impl Lts {
    pub fn state_of(&self, m: &Marking) -> Option<usize> {
        self.states.iter().position(|s| s == m)
    }

    pub fn successors(&self) -> Vec<Vec<(Label, usize)>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (a, l, b) in &self.edges {
            out[*a].push((l.clone(), *b));
        }
        out
    }
}

/// Breadth-first exploration. States are numbered in discovery order and
/// successors are expanded in transition order, so the result is
/// deterministic. Exceeding either cap is an error.
pub fn reach_lts(net: &Net, initials: &[Marking], state_cap: usize, edge_cap: usize) -> Result<Lts, NetError> {
    let mut states: Vec<Marking> = Vec::new();
    let mut index: HashMap<Marking, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut init_ids = Vec::new();
    let mut intern = |m: Marking, states: &mut Vec<Marking>, queue: &mut VecDeque<usize>| -> Result<usize, NetError> {
        if let Some(&i) = index.get(&m) {
            return Ok(i);
        }
        if states.len() >= state_cap {
            return Err(NetError::CapExceeded { reached: states.len() + 1, cap: state_cap });
        }
        let i = states.len();
        index.insert(m.clone(), i);
        states.push(m);
        queue.push_back(i);
        Ok(i)
    };
    for m in initials {
        init_ids.push(intern(m.clone(), &mut states, &mut queue)?);
    }
    let mut edges = Vec::new();
    let mut seen_edges = HashSet::new();
    while let Some(i) = queue.pop_front() {
        let m = states[i].clone();
        for t in net.enabled_transitions(&m) {
            let next = m.diff(&t.pre).union(&t.post)?;
            let j = intern(next, &mut states, &mut queue)?;
            if seen_edges.insert((i, t.label.clone(), j)) {
                if edges.len() >= edge_cap {
                    return Err(NetError::CapExceeded { reached: states.len(), cap: state_cap });
                }
                edges.push((i, t.label.clone(), j));
            }
        }
    }
    Ok(Lts { states, edges, initials: init_ids })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::NetBuilder;

    fn fig10() -> Net {
        let mut b = NetBuilder::new("abs");
        let s = b.places(&["s1", "s2", "s3", "s4", "s5", "s6"]);
        let one = Marking::singleton;
        b.transition("t1", one(s[0]), Label::parse("a"), one(s[1]));
        b.transition("t2", one(s[0]), Label::parse("b"), one(s[2]));
        b.transition("t3", Marking::from_places([s[1], s[2]]).unwrap(), Label::parse("c"), Marking::empty());
        b.transition("u1", one(s[3]), Label::parse("a"), one(s[4]));
        b.transition("u2", one(s[3]), Label::parse("b"), one(s[5]));
        b.build().unwrap()
    }

    #[test]
    fn singleton_start_has_no_c_edge() {
        let net = fig10();
        let lts = reach_lts(&net, &[net.marking_of(&["s1"])], 100, 100).unwrap();
        assert_eq!(lts.states.len(), 3);
        assert_eq!(lts.edges.len(), 2);
        assert!(lts.edges.iter().all(|(_, l, _)| l != &Label::parse("c")));
    }

    #[test]
    fn doubled_start_reaches_c() {
        let net = fig10();
        let lts = reach_lts(&net, &[net.marking_of(&["s1", "s1"])], 100, 100).unwrap();
        assert!(lts.states.contains(&net.marking_of(&["s2", "s3"])));
        assert!(lts.edges.iter().any(|(_, l, _)| l == &Label::parse("c")));
    }

    #[test]
    fn caps_are_enforced() {
        let mut b = NetBuilder::new("pump");
        let s = b.places(&["s3", "s4"]);
        b.transition("t", Marking::singleton(s[0]), Label::Tau, Marking::from_places([s[0], s[1]]).unwrap());
        let net = b.build().unwrap();
        let err = reach_lts(&net, &[net.marking_of(&["s3"])], 100, 10_000).unwrap_err();
        assert!(matches!(err, NetError::CapExceeded { cap: 100, .. }));
    }
}
