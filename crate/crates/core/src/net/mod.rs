//! Multisets, P/T nets with silent moves and the token game.

mod marking;
mod reach;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use marking::{ms_diff, ms_union, Marking, PlaceId};
pub use reach::{reach_lts, Lts};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("multiplicity overflow")]
    Overflow,
    #[error("duplicate place `{0}`")]
    DuplicatePlace(String),
    #[error("duplicate transition `{0}`")]
    DuplicateTransition(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` has an empty pre-set")]
    EmptyPreset(String),
    #[error("place index {0} out of range")]
    PlaceOutOfRange(u32),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("state space too large or unbounded: {reached} states reached (cap {cap})")]
    CapExceeded { reached: usize, cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Tau,
    Visible(String),
}

impl Label {
    /// `tau` is reserved for the silent action.
    pub fn parse(s: &str) -> Label {
        if s == "tau" {
            Label::Tau
        } else {
            Label::Visible(s.to_string())
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => f.write_str("tau"),
            Label::Visible(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionId(pub u32);

impl TransitionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub id: TransitionId,
    pub name: String,
    pub pre: Marking,
    pub label: Label,
    pub post: Marking,
}

impl Transition {
    /// l(t) = τ and |•t| = |t•| = 1.
    pub fn is_tau_sequential(&self) -> bool {
        self.label.is_tau() && self.pre.size() == 1 && self.post.size() == 1
    }
}

/// Immutable P/T net. Build one with [`NetBuilder`] or the text parser.
#[derive(Clone, Debug)]
pub struct Net {
    name: String,
    places: Vec<String>,
    place_index: HashMap<String, PlaceId>,
    transitions: Vec<Transition>,
    markings: BTreeMap<String, Marking>,
}

impl Net {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.places.len() as u32).map(PlaceId)
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.index()]
    }

    pub fn place(&self, name: &str) -> Option<PlaceId> {
        self.place_index.get(name).copied()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id.index()]
    }

    pub fn transition_by_name(&self, name: &str) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.name == name)
    }

    pub fn named_markings(&self) -> &BTreeMap<String, Marking> {
        &self.markings
    }

    /// Marking with one token on each named place. Panics on unknown names,
    /// intended for tests and examples.
    pub fn marking_of(&self, names: &[&str]) -> Marking {
        Marking::from_places(names.iter().map(|n| {
            self.place(n).unwrap_or_else(|| panic!("unknown place {n}"))
        }))
        .expect("small marking")
    }

    /// •t ⊆ m.
    pub fn enabled(&self, m: &Marking, t: TransitionId) -> Result<bool, NetError> {
        let t = self
            .transitions
            .get(t.index())
            .ok_or_else(|| NetError::UnknownTransition(format!("{}", t.0)))?;
        Ok(t.pre.is_sub(m))
    }

    /// (m ⊖ •t) ⊕ t•.
    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking, NetError> {
        if !self.enabled(m, t)? {
            return Err(NetError::NotEnabled(self.transition(t).name.clone()));
        }
        let t = self.transition(t);
        m.diff(&t.pre).union(&t.post)
    }

    pub fn enabled_transitions<'a>(&'a self, m: &'a Marking) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| t.pre.is_sub(m))
    }

    /// Weakly connected components of the place/transition graph, as a
    /// component number per place.
    pub fn components(&self) -> Vec<usize> {
        let n = self.places.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for t in &self.transitions {
            let mut it = t.pre.support().chain(t.post.support());
            if let Some(first) = it.next() {
                for p in it {
                    let (a, b) = (find(&mut parent, first.index()), find(&mut parent, p.index()));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut ids = HashMap::new();
        (0..n)
            .map(|p| {
                let r = find(&mut parent, p);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect()
    }

    /// Renders `m` as a marking expression such as `s1+2*s2`; θ is `0`.
    pub fn format_marking(&self, m: &Marking) -> String {
        if m.is_empty() {
            return "0".to_string();
        }
        m.iter()
            .map(|(p, c)| {
                if c == 1 {
                    self.place_name(p).to_string()
                } else {
                    format!("{c}*{}", self.place_name(p))
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Incremental net construction with validation in [`NetBuilder::build`].
#[derive(Debug, Default)]
pub struct NetBuilder {
    name: String,
    places: Vec<String>,
    transitions: Vec<(String, Marking, Label, Marking)>,
    markings: Vec<(String, Marking)>,
    errors: Vec<NetError>,
}

impl NetBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetBuilder { name: name.into(), ..Default::default() }
    }

    pub fn place(&mut self, name: impl Into<String>) -> PlaceId {
        let name = name.into();
        if self.places.contains(&name) {
            self.errors.push(NetError::DuplicatePlace(name.clone()));
        }
        self.places.push(name);
        PlaceId(self.places.len() as u32 - 1)
    }

    pub fn places(&mut self, names: &[&str]) -> Vec<PlaceId> {
        names.iter().map(|n| self.place(*n)).collect()
    }

    pub fn transition(&mut self, name: impl Into<String>, pre: Marking, label: Label, post: Marking) -> TransitionId {
        self.transitions.push((name.into(), pre, label, post));
        TransitionId(self.transitions.len() as u32 - 1)
    }

    pub fn marking(&mut self, name: impl Into<String>, m: Marking) {
        self.markings.push((name.into(), m));
    }

    pub fn lookup(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p == name).map(|i| PlaceId(i as u32))
    }

    pub fn build(self) -> Result<Net, NetError> {
        if let Some(e) = self.errors.into_iter().next() {
            return Err(e);
        }
        let n = self.places.len() as u32;
        let check = |m: &Marking| match m.support().find(|p| p.0 >= n) {
            Some(p) => Err(NetError::PlaceOutOfRange(p.0)),
            None => Ok(()),
        };
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (i, (name, pre, label, post)) in self.transitions.into_iter().enumerate() {
            if transitions.iter().any(|t: &Transition| t.name == name) {
                return Err(NetError::DuplicateTransition(name));
            }
            if pre.is_empty() {
                return Err(NetError::EmptyPreset(name));
            }
            check(&pre)?;
            check(&post)?;
            transitions.push(Transition { id: TransitionId(i as u32), name, pre, label, post });
        }
        let mut markings = BTreeMap::new();
        for (name, m) in self.markings {
            check(&m)?;
            markings.insert(name, m);
        }
        let place_index = self.places.iter().enumerate().map(|(i, p)| (p.clone(), PlaceId(i as u32))).collect();
        Ok(Net { name: self.name, places: self.places, place_index, transitions, markings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Net {
        let mut b = NetBuilder::new("tau1");
        let s = b.places(&["s1", "s2", "s3"]);
        b.transition(
            "t1",
            Marking::from_places([s[0], s[1]]).unwrap(),
            Label::parse("a"),
            Marking::singleton(s[2]),
        );
        b.build().unwrap()
    }

    #[test]
    fn enabling_and_firing() {
        let net = fig1();
        let t1 = TransitionId(0);
        assert!(net.enabled(&net.marking_of(&["s1", "s2"]), t1).unwrap());
        assert!(!net.enabled(&net.marking_of(&["s1", "s1"]), t1).unwrap());
        assert!(!net.enabled(&Marking::empty(), t1).unwrap());
        assert_eq!(net.fire(&net.marking_of(&["s1", "s2"]), t1).unwrap(), net.marking_of(&["s3"]));
        assert!(matches!(net.fire(&net.marking_of(&["s1"]), t1), Err(NetError::NotEnabled(_))));
        assert!(net.enabled(&Marking::empty(), TransitionId(9)).is_err());
    }

    #[test]
    fn firing_a_splitting_transition() {
        let mut b = NetBuilder::new("d-place");
        let s = b.places(&["s1", "s2", "s3", "s4", "s5", "s6"]);
        b.transition("t1", Marking::singleton(s[0]), Label::parse("a"), Marking::singleton(s[1]));
        let t3 = b.transition("t3", Marking::singleton(s[3]), Label::parse("a"), Marking::from_places([s[4], s[5]]).unwrap());
        let net = b.build().unwrap();
        // s1 alone does not enable t3
        assert!(!net.enabled(&net.marking_of(&["s1"]), t3).unwrap());
        assert_eq!(net.fire(&net.marking_of(&["s4"]), t3).unwrap(), net.marking_of(&["s5", "s6"]));
        assert_eq!(net.fire(&net.marking_of(&["s1", "s4"]), t3).unwrap(), net.marking_of(&["s1", "s5", "s6"]));
    }

    #[test]
    fn builder_rejects_bad_models() {
        let mut b = NetBuilder::new("x");
        b.place("a");
        b.place("a");
        assert_eq!(b.build().unwrap_err(), NetError::DuplicatePlace("a".into()));

        let mut b = NetBuilder::new("x");
        let a = b.place("a");
        b.transition("t", Marking::empty(), Label::Tau, Marking::singleton(a));
        assert!(matches!(b.build(), Err(NetError::EmptyPreset(_))));

        let mut b = NetBuilder::new("x");
        let a = b.place("a");
        b.transition("t", Marking::singleton(a), Label::Tau, Marking::empty());
        b.transition("t", Marking::singleton(a), Label::Tau, Marking::empty());
        assert!(matches!(b.build(), Err(NetError::DuplicateTransition(_))));

        let mut b = NetBuilder::new("x");
        let a = b.place("a");
        b.transition("t", Marking::singleton(a), Label::Tau, Marking::singleton(PlaceId(7)));
        assert!(matches!(b.build(), Err(NetError::PlaceOutOfRange(7))));
    }

    #[test]
    fn components_and_formatting() {
        let mut b = NetBuilder::new("x");
        let s = b.places(&["a", "b", "c", "d"]);
        b.transition("t", Marking::singleton(s[0]), Label::Tau, Marking::singleton(s[2]));
        let net = b.build().unwrap();
        let c = net.components();
        assert_eq!(c[0], c[2]);
        assert_ne!(c[0], c[1]);
        assert_ne!(c[1], c[3]);
        let m = Marking::from_counts([(s[1], 2), (s[0], 1)]).unwrap();
        assert_eq!(net.format_marking(&m), "a+2*b");
        assert_eq!(net.format_marking(&Marking::empty()), "0");
    }

    #[test]
    fn tau_label_is_reserved() {
        assert_eq!(Label::parse("tau"), Label::Tau);
        assert_eq!(Label::parse("a"), Label::Visible("a".into()));
    }
}
