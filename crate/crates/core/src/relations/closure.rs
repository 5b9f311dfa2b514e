use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::matching::hopcroft_karp;
use super::{PlaceOrTheta, PlaceRelation};
use crate::net::{Marking, PlaceId};

/// Association multiset proving a closure membership.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchWitness {
    pub pairs: Vec<(PlaceOrTheta, PlaceOrTheta)>,
}

impl MatchWitness {
    /// Left and right projections, θ dropped.
    pub fn projections(&self) -> (Marking, Marking) {
        let l = Marking::from_places(self.pairs.iter().filter_map(|(a, _)| a.place())).expect("witness fits");
        let r = Marking::from_places(self.pairs.iter().filter_map(|(_, b)| b.place())).expect("witness fits");
        (l, r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Dense bit matrix over place slots; slot `n` is θ.
#[derive(Clone, Debug)]
pub(crate) struct RelIndex {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl RelIndex {
    pub(crate) fn new(n_places: usize) -> Self {
        let words = (n_places + 1).div_ceil(64);
        RelIndex { n: n_places, words, bits: vec![0; (n_places + 1) * words] }
    }

    pub(crate) fn from_relation(rel: &PlaceRelation, n_places: usize) -> Self {
        let mut idx = Self::new(n_places.max(rel.place_bound()));
        for (a, b) in rel.pairs() {
            idx.set(a, b);
        }
        idx
    }

    pub(crate) fn places(&self) -> usize {
        self.n
    }

    pub(crate) fn slot(&self, x: PlaceOrTheta) -> usize {
        match x {
            PlaceOrTheta::Theta => self.n,
            PlaceOrTheta::Place(p) => p.index(),
        }
    }

    #[cfg(test)]
    fn unslot(&self, s: usize) -> PlaceOrTheta {
        if s == self.n {
            PlaceOrTheta::Theta
        } else {
            PlaceOrTheta::Place(PlaceId(s as u32))
        }
    }

    pub(crate) fn set(&mut self, a: PlaceOrTheta, b: PlaceOrTheta) {
        let (i, j) = (self.slot(a), self.slot(b));
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    #[inline]
    pub(crate) fn has_slots(&self, i: usize, j: usize) -> bool {
        if i > self.n || j > self.n {
            return false;
        }
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub(crate) fn has(&self, a: PlaceOrTheta, b: PlaceOrTheta) -> bool {
        self.has_slots(self.slot(a), self.slot(b))
    }

    #[cfg(test)]
    pub(crate) fn inverse(&self) -> RelIndex {
        let mut out = RelIndex::new(self.n);
        for i in 0..=self.n {
            for j in 0..=self.n {
                if self.has_slots(i, j) {
                    out.bits[j * out.words + i / 64] |= 1 << (i % 64);
                }
            }
        }
        out
    }

    /// Copy without θ pairs.
    pub(crate) fn bar(&self) -> RelIndex {
        let mut out = self.clone();
        for i in 0..=self.n {
            let j = self.n;
            out.bits[i * out.words + j / 64] &= !(1 << (j % 64));
        }
        for w in 0..self.words {
            out.bits[self.n * self.words + w] = 0;
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn to_relation(&self) -> PlaceRelation {
        let mut r = PlaceRelation::new();
        for i in 0..=self.n {
            for j in 0..=self.n {
                if self.has_slots(i, j) && !(i == self.n && j == self.n) {
                    r.insert(self.unslot(i), self.unslot(j)).expect("not theta-theta");
                }
            }
        }
        r
    }
}

fn fits(idx: &RelIndex, m: &Marking) -> bool {
    m.support().all(|p| p.index() < idx.places())
}

/// Plain additive closure membership on an index.
pub(crate) fn member_plain(idx: &RelIndex, m1: &Marking, m2: &Marking, want_witness: bool) -> Option<MatchWitness> {
    if m1.size() != m2.size() {
        return None;
    }
    if !fits(idx, m1) || !fits(idx, m2) {
        return None;
    }
    // cheap necessary check: every place of either side has some partner
    for (p, _) in m1.iter() {
        if !m2.support().any(|q| idx.has_slots(p.index(), q.index())) {
            return None;
        }
    }
    for (q, _) in m2.iter() {
        if !m1.support().any(|p| idx.has_slots(p.index(), q.index())) {
            return None;
        }
    }
    let left = m1.tokens();
    let right = m2.tokens();
    let adj: Vec<Vec<u32>> = left
        .iter()
        .map(|p| {
            right
                .iter()
                .enumerate()
                .filter(|(_, q)| idx.has_slots(p.index(), q.index()))
                .map(|(j, _)| j as u32)
                .collect()
        })
        .collect();
    let m = hopcroft_karp(&adj, right.len());
    if m.iter().any(|x| x.is_none()) {
        return None;
    }
    if !want_witness {
        return Some(MatchWitness::default());
    }
    let mut pairs: Vec<_> = left
        .iter()
        .zip(&m)
        .map(|(&p, j)| (PlaceOrTheta::Place(p), PlaceOrTheta::Place(right[j.unwrap() as usize])))
        .collect();
    pairs.sort();
    Some(MatchWitness { pairs })
}

/// d-additive closure membership on an index. Both token lists are padded
/// with θ slots to a common length and θ–θ edges are always allowed.
pub(crate) fn member_d(idx: &RelIndex, m1: &Marking, m2: &Marking, want_witness: bool) -> Option<MatchWitness> {
    if !fits(idx, m1) || !fits(idx, m2) {
        return None;
    }
    let theta = PlaceOrTheta::Theta;
    let mut left: Vec<PlaceOrTheta> = m1.tokens().into_iter().map(PlaceOrTheta::Place).collect();
    let mut right: Vec<PlaceOrTheta> = m2.tokens().into_iter().map(PlaceOrTheta::Place).collect();
    let (k1, k2) = (left.len(), right.len());
    left.extend(std::iter::repeat_n(theta, k2));
    right.extend(std::iter::repeat_n(theta, k1));
    let adj: Vec<Vec<u32>> = left
        .iter()
        .map(|&a| {
            right
                .iter()
                .enumerate()
                .filter(|&(_, &b)| (a.is_theta() && b.is_theta()) || idx.has(a, b))
                .map(|(j, _)| j as u32)
                .collect()
        })
        .collect();
    let m = hopcroft_karp(&adj, right.len());
    if m.iter().any(|x| x.is_none()) {
        return None;
    }
    if !want_witness {
        return Some(MatchWitness::default());
    }
    let mut pairs: Vec<_> = left
        .iter()
        .zip(&m)
        .map(|(&a, j)| (a, right[j.unwrap() as usize]))
        .filter(|(a, b)| !(a.is_theta() && b.is_theta()))
        .collect();
    pairs.sort();
    Some(MatchWitness { pairs })
}

fn bound(rel: &PlaceRelation, m1: &Marking, m2: &Marking) -> usize {
    let mb = |m: &Marking| m.support().map(|p| p.index() + 1).max().unwrap_or(0);
    rel.place_bound().max(mb(m1)).max(mb(m2))
}

/// Returns a witness iff `(m1, m2)` is in the additive closure of `rel`.
/// θ pairs of a d-extended relation are ignored.
pub fn additive_member(rel: &PlaceRelation, m1: &Marking, m2: &Marking) -> Option<MatchWitness> {
    let idx = RelIndex::from_relation(rel, bound(rel, m1, m2)).bar();
    member_plain(&idx, m1, m2, true)
}

/// Returns a witness iff `(m1, m2)` is in the d-additive closure of `rel`.
pub fn d_additive_member(rel: &PlaceRelation, m1: &Marking, m2: &Marking) -> Option<MatchWitness> {
    let idx = RelIndex::from_relation(rel, bound(rel, m1, m2));
    member_d(&idx, m1, m2, true)
}

/// Images of one place through the index, θ last.
pub(crate) fn images(idx: &RelIndex, p: PlaceId, side: Side) -> Vec<PlaceOrTheta> {
    let n = idx.places();
    (0..=n)
        .filter(|&j| match side {
            Side::Left => idx.has_slots(p.index(), j),
            Side::Right => idx.has_slots(j, p.index()),
        })
        .map(|j| if j == n { PlaceOrTheta::Theta } else { PlaceOrTheta::Place(PlaceId(j as u32)) })
        .collect()
}

/// All markings related to `m` by the relation, taking one image per token.
/// With `side == Left` these are the `m'` with `(m, m')` in the closure.
/// θ images contribute nothing, so d-extended relations may yield smaller
/// markings.
pub fn related_markings(rel: &PlaceRelation, m: &Marking, side: Side) -> Vec<Marking> {
    let idx = RelIndex::from_relation(rel, bound(rel, m, &Marking::empty()));
    related_on(&idx, m, side)
}

pub(crate) fn related_on(idx: &RelIndex, m: &Marking, side: Side) -> Vec<Marking> {
    let mut acc: BTreeSet<Marking> = BTreeSet::from([Marking::empty()]);
    for (p, c) in m.iter() {
        if p.index() >= idx.places() {
            return Vec::new();
        }
        let imgs = images(idx, p, side);
        if imgs.is_empty() {
            return Vec::new();
        }
        let parts = multichoose(&imgs, c);
        let mut next = BTreeSet::new();
        for a in &acc {
            for part in &parts {
                next.insert(a.union(part).expect("bounded by input size"));
            }
        }
        acc = next;
    }
    acc.into_iter().collect()
}

// Multisets of size c drawn from `imgs`, θ draws dropped.
fn multichoose(imgs: &[PlaceOrTheta], c: u32) -> Vec<Marking> {
    fn rec(imgs: &[PlaceOrTheta], start: usize, left: u32, cur: &mut Vec<PlaceId>, out: &mut Vec<Marking>) {
        if left == 0 {
            out.push(Marking::from_places(cur.iter().copied()).expect("small"));
            return;
        }
        for i in start..imgs.len() {
            let pushed = if let PlaceOrTheta::Place(p) = imgs[i] {
                cur.push(p);
                true
            } else {
                false
            };
            rec(imgs, i, left - 1, cur, out);
            if pushed {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(imgs, 0, c, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Net, NetBuilder};

    fn net() -> Net {
        let mut b = NetBuilder::new("n");
        b.places(&["s1", "s2", "s3", "s4", "s5", "s6"]);
        b.build().unwrap()
    }

    fn p(net: &Net, n: &str) -> PlaceOrTheta {
        if n == "0" {
            PlaceOrTheta::Theta
        } else {
            PlaceOrTheta::Place(net.place(n).unwrap())
        }
    }

    #[test]
    fn permuted_membership() {
        let n = net();
        let r = PlaceRelation::named(&n, &[("s1", "s3"), ("s1", "s4"), ("s2", "s4")]);
        let w = additive_member(&r, &n.marking_of(&["s1", "s2"]), &n.marking_of(&["s4", "s3"])).unwrap();
        assert_eq!(w.pairs, vec![(p(&n, "s1"), p(&n, "s3")), (p(&n, "s2"), p(&n, "s4"))]);
    }

    #[test]
    fn trivial_memberships() {
        let n = net();
        let r = PlaceRelation::named(&n, &[("s1", "s1")]);
        assert_eq!(additive_member(&r, &Marking::empty(), &Marking::empty()).unwrap().pairs, vec![]);
        assert!(additive_member(&r, &n.marking_of(&["s1"]), &n.marking_of(&["s1", "s1"])).is_none());
        assert!(d_additive_member(&r, &n.marking_of(&["s1"]), &n.marking_of(&["s1", "s1"])).is_none());
    }

    #[test]
    fn d_membership_examples() {
        let n = net();
        let r = PlaceRelation::named(&n, &[("s1", "s4"), ("0", "s5"), ("s2", "s6"), ("s3", "0")]);
        let w = d_additive_member(&r, &n.marking_of(&["s1"]), &n.marking_of(&["s4", "s5"])).unwrap();
        assert_eq!(w.pairs, vec![(p(&n, "0"), p(&n, "s5")), (p(&n, "s1"), p(&n, "s4"))]);
        let w = d_additive_member(&r, &n.marking_of(&["s2", "s3"]), &n.marking_of(&["s6"])).unwrap();
        assert_eq!(w.pairs, vec![(p(&n, "s2"), p(&n, "s6")), (p(&n, "s3"), p(&n, "0"))]);
        assert!(additive_member(&r, &n.marking_of(&["s1"]), &n.marking_of(&["s4", "s5"])).is_none());
    }

    #[test]
    fn related_markings_examples() {
        let n = net();
        let r = PlaceRelation::named(&n, &[("s1", "s3"), ("s1", "s4"), ("s2", "s4")]);
        let got = related_markings(&r, &n.marking_of(&["s1", "s2"]), Side::Left);
        let mut want = vec![n.marking_of(&["s3", "s4"]), n.marking_of(&["s4", "s4"])];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(related_markings(&r, &Marking::empty(), Side::Left), vec![Marking::empty()]);
        let back = related_markings(&r, &n.marking_of(&["s4"]), Side::Right);
        assert_eq!(back, vec![n.marking_of(&["s1"]), n.marking_of(&["s2"])]);
    }

    #[test]
    fn theta_images_contribute_nothing() {
        let n = net();
        let r = PlaceRelation::named(&n, &[("s1", "0"), ("s1", "s2")]);
        let got = related_markings(&r, &n.marking_of(&["s1", "s1"]), Side::Left);
        assert_eq!(got, vec![Marking::empty(), n.marking_of(&["s2"]), n.marking_of(&["s2", "s2"])]);
    }

    #[test]
    fn index_round_trip_and_bar() {
        let n = net();
        let r = PlaceRelation::named(&n, &[("s1", "0"), ("0", "s2"), ("s3", "s4")]);
        let idx = RelIndex::from_relation(&r, 6);
        assert_eq!(idx.to_relation(), r);
        assert_eq!(idx.bar().to_relation(), r.restrict_bar());
        assert_eq!(idx.inverse().to_relation(), r.inverse());
    }
}
