use std::fmt;

use serde::{Deserialize, Serialize};

use super::NetError;

/// Dense handle of a place inside one [`Net`](super::Net).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceId(pub u32);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PlaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Finite multiset of places.
///
/// Entries are kept sorted by place with no zero counts, so the derived
/// `Ord` is the canonical lexicographic order on `(place, count)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Marking {
    entries: Vec<(PlaceId, u32)>,
}

impl Marking {
    /// The empty marking θ.
    pub fn empty() -> Self {
        Marking { entries: Vec::new() }
    }

    pub fn singleton(p: PlaceId) -> Self {
        Marking { entries: vec![(p, 1)] }
    }

    /// Builds a marking from `(place, count)` pairs; repeated places add up.
    pub fn from_counts<I>(counts: I) -> Result<Self, NetError>
    where
        I: IntoIterator<Item = (PlaceId, u32)>,
    {
        let mut entries: Vec<(PlaceId, u32)> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        entries.sort_by_key(|&(p, _)| p);
        let mut out: Vec<(PlaceId, u32)> = Vec::with_capacity(entries.len());
        for (p, c) in entries {
            match out.last_mut() {
                Some((q, n)) if *q == p => *n = n.checked_add(c).ok_or(NetError::Overflow)?,
                _ => out.push((p, c)),
            }
        }
        Ok(Marking { entries: out })
    }

    /// Builds a marking with one token per listed place.
    pub fn from_places<I: IntoIterator<Item = PlaceId>>(places: I) -> Result<Self, NetError> {
        Self::from_counts(places.into_iter().map(|p| (p, 1)))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of tokens, |m|.
    pub fn size(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c as u64).sum()
    }

    pub fn count(&self, p: PlaceId) -> u32 {
        match self.entries.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    /// `(place, count)` pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (PlaceId, u32)> + '_ {
        self.entries.iter().copied()
    }

    /// Places of the support, dom(m).
    pub fn support(&self) -> impl Iterator<Item = PlaceId> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }

    /// One entry per token, places repeated by multiplicity, in canonical order.
    pub fn tokens(&self) -> Vec<PlaceId> {
        let mut v = Vec::with_capacity(self.size() as usize);
        for &(p, c) in &self.entries {
            v.extend(std::iter::repeat_n(p, c as usize));
        }
        v
    }

    /// m1 ⊕ m2. Fails only when a multiplicity would overflow.
    pub fn union(&self, other: &Marking) -> Result<Marking, NetError> {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let c = a[i].1.checked_add(b[j].1).ok_or(NetError::Overflow)?;
                out.push((a[i].0, c));
                i += 1;
                j += 1;
            }
        }
        Ok(Marking { entries: out })
    }

    /// m1 ⊖ m2, truncated at zero.
    pub fn diff(&self, other: &Marking) -> Marking {
        let entries = self
            .entries
            .iter()
            .filter_map(|&(p, c)| {
                let r = c.saturating_sub(other.count(p));
                (r > 0).then_some((p, r))
            })
            .collect();
        Marking { entries }
    }

    /// Pointwise inclusion `self ⊆ other`.
    pub fn is_sub(&self, other: &Marking) -> bool {
        self.entries.iter().all(|&(p, c)| other.count(p) >= c)
    }

    /// n·m.
    pub fn scale(&self, n: u32) -> Result<Marking, NetError> {
        if n == 0 {
            return Ok(Marking::empty());
        }
        let entries = self
            .entries
            .iter()
            .map(|&(p, c)| c.checked_mul(n).map(|c| (p, c)).ok_or(NetError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Marking { entries })
    }

    /// Replaces one token on `from` by one token on `to`.
    pub(crate) fn move_token(&self, from: PlaceId, to: PlaceId) -> Marking {
        let mut counts: Vec<(PlaceId, u32)> = self.entries.clone();
        if let Ok(i) = counts.binary_search_by_key(&from, |&(q, _)| q) {
            counts[i].1 -= 1;
            if counts[i].1 == 0 {
                counts.remove(i);
            }
        }
        match counts.binary_search_by_key(&to, |&(q, _)| q) {
            Ok(i) => counts[i].1 += 1,
            Err(i) => counts.insert(i, (to, 1)),
        }
        Marking { entries: counts }
    }

    /// Largest multiplicity, 0 for θ.
    pub fn max_count(&self) -> u32 {
        self.entries.iter().map(|&(_, c)| c).max().unwrap_or(0)
    }
}

pub fn ms_union(m1: &Marking, m2: &Marking) -> Result<Marking, NetError> {
    m1.union(m2)
}

pub fn ms_diff(m1: &Marking, m2: &Marking) -> Marking {
    m1.diff(m2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: &[(u32, u32)]) -> Marking {
        Marking::from_counts(v.iter().map(|&(p, c)| (PlaceId(p), c))).unwrap()
    }

    #[test]
    fn union_examples() {
        assert_eq!(ms_union(&Marking::empty(), &Marking::empty()).unwrap(), Marking::empty());
        let s = ms_union(&m(&[(1, 1)]), &m(&[(2, 1)])).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(ms_union(&m(&[(1, 2)]), &m(&[(1, 1), (2, 1)])).unwrap(), m(&[(1, 3), (2, 1)]));
    }

    #[test]
    fn diff_examples() {
        assert_eq!(ms_diff(&m(&[(1, 1), (2, 1)]), &m(&[(2, 1)])), m(&[(1, 1)]));
        assert_eq!(ms_diff(&m(&[(1, 2)]), &m(&[(1, 3), (2, 1)])), Marking::empty());
        let x = m(&[(0, 4), (3, 1)]);
        assert_eq!(ms_diff(&x, &Marking::empty()), x);
    }

    #[test]
    fn overflow_is_checked() {
        let big = m(&[(0, u32::MAX)]);
        assert_eq!(big.union(&m(&[(0, 1)])), Err(NetError::Overflow));
        assert_eq!(big.scale(2), Err(NetError::Overflow));
        assert!(Marking::from_counts([(PlaceId(0), u32::MAX), (PlaceId(0), 1)]).is_err());
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let a = m(&[(2, 1), (0, 0), (1, 3)]);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![(PlaceId(1), 3), (PlaceId(2), 1)]);
        assert_eq!(a.tokens(), vec![PlaceId(1), PlaceId(1), PlaceId(1), PlaceId(2)]);
    }

    #[test]
    fn move_token_keeps_canonical_form() {
        let a = m(&[(0, 1), (1, 1)]);
        assert_eq!(a.move_token(PlaceId(0), PlaceId(1)), m(&[(1, 2)]));
        assert_eq!(a.move_token(PlaceId(1), PlaceId(5)), m(&[(0, 1), (5, 1)]));
    }
}
