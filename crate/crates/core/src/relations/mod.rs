//! Place relations and their (d-)additive closures.

mod closure;
pub mod matching;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{Net, PlaceId};

pub use closure::{additive_member, d_additive_member, related_markings, MatchWitness, Side};
pub(crate) use closure::{member_d, member_plain, related_on as related_on_index, RelIndex};

/// A place, or the θ pseudo-place used by the d-variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlaceOrTheta {
    Theta,
    Place(PlaceId),
}

impl PlaceOrTheta {
    pub fn place(self) -> Option<PlaceId> {
        match self {
            PlaceOrTheta::Theta => None,
            PlaceOrTheta::Place(p) => Some(p),
        }
    }

    pub fn is_theta(self) -> bool {
        matches!(self, PlaceOrTheta::Theta)
    }

    pub fn display<'a>(self, net: &'a Net) -> impl fmt::Display + 'a {
        struct D<'a>(PlaceOrTheta, &'a Net);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self.0 {
                    PlaceOrTheta::Theta => f.write_str("0"),
                    PlaceOrTheta::Place(p) => f.write_str(self.1.place_name(p)),
                }
            }
        }
        D(self, net)
    }
}

impl From<PlaceId> for PlaceOrTheta {
    fn from(p: PlaceId) -> Self {
        PlaceOrTheta::Place(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationKind {
    Plain,
    DExtended,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("the pair (θ, θ) cannot be stored in a relation")]
    ThetaTheta,
}

/// Finite set of place pairs, possibly mentioning θ. The kind is derived
/// from the contents: any θ makes it d-extended.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceRelation {
    pairs: BTreeSet<(PlaceOrTheta, PlaceOrTheta)>,
}

impl PlaceRelation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = (PlaceOrTheta, PlaceOrTheta)>,
    {
        let mut r = Self::new();
        for (a, b) in pairs {
            r.insert(a, b)?;
        }
        Ok(r)
    }

    /// Relation over real places only.
    pub fn plain<I: IntoIterator<Item = (PlaceId, PlaceId)>>(pairs: I) -> Self {
        PlaceRelation { pairs: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect() }
    }

    /// Builds a relation from place names, `"0"` standing for θ. Panics on
    /// unknown names; meant for tests and examples.
    pub fn named(net: &Net, pairs: &[(&str, &str)]) -> Self {
        let conv = |n: &str| {
            if n == "0" {
                PlaceOrTheta::Theta
            } else {
                PlaceOrTheta::Place(net.place(n).unwrap_or_else(|| panic!("unknown place {n}")))
            }
        };
        Self::from_pairs(pairs.iter().map(|(a, b)| (conv(a), conv(b)))).expect("no (0, 0) pair")
    }

    pub fn insert(&mut self, a: PlaceOrTheta, b: PlaceOrTheta) -> Result<bool, RelationError> {
        if a.is_theta() && b.is_theta() {
            return Err(RelationError::ThetaTheta);
        }
        Ok(self.pairs.insert((a, b)))
    }

    pub fn contains(&self, a: PlaceOrTheta, b: PlaceOrTheta) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (PlaceOrTheta, PlaceOrTheta)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn kind(&self) -> RelationKind {
        if self.pairs.iter().any(|(a, b)| a.is_theta() || b.is_theta()) {
            RelationKind::DExtended
        } else {
            RelationKind::Plain
        }
    }

    /// R̄: the pairs between real places.
    pub fn restrict_bar(&self) -> PlaceRelation {
        PlaceRelation { pairs: self.pairs.iter().filter(|(a, b)| !a.is_theta() && !b.is_theta()).copied().collect() }
    }

    pub fn inverse(&self) -> PlaceRelation {
        PlaceRelation { pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect() }
    }

    /// R1 ∘ R2 (first R1, then R2). θ is composed as a pseudo-place that is
    /// implicitly related to itself on both sides, matching the d-closure.
    pub fn compose(&self, other: &PlaceRelation) -> PlaceRelation {
        let mut pairs = BTreeSet::new();
        for &(a, b) in &self.pairs {
            for &(c, d) in &other.pairs {
                if b == c && !(a.is_theta() && d.is_theta()) {
                    pairs.insert((a, d));
                }
            }
            if b.is_theta() {
                pairs.insert((a, b));
            }
        }
        for &(c, d) in &other.pairs {
            if c.is_theta() {
                pairs.insert((c, d));
            }
        }
        PlaceRelation { pairs }
    }

    pub fn union(&self, other: &PlaceRelation) -> PlaceRelation {
        PlaceRelation { pairs: self.pairs.union(&other.pairs).copied().collect() }
    }

    pub fn is_subset(&self, other: &PlaceRelation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    /// I_S.
    pub fn identity(net: &Net) -> PlaceRelation {
        PlaceRelation::plain(net.places().map(|p| (p, p)))
    }

    /// Largest place index mentioned, used to size dense indexes.
    pub(crate) fn place_bound(&self) -> usize {
        self.pairs
            .iter()
            .flat_map(|&(a, b)| [a.place(), b.place()])
            .flatten()
            .map(|p| p.index() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn display<'a>(&'a self, net: &'a Net) -> impl fmt::Display + 'a {
        struct D<'a>(&'a PlaceRelation, &'a Net);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("{")?;
                for (i, (a, b)) in self.0.pairs().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "({}, {})", a.display(self.1), b.display(self.1))?;
                }
                f.write_str("}")
            }
        }
        D(self, net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::NetBuilder;

    fn net() -> Net {
        let mut b = NetBuilder::new("n");
        b.places(&["s1", "s2", "s3", "s4", "s5", "s6"]);
        b.build().unwrap()
    }

    #[test]
    fn bar_drops_theta_pairs() {
        let n = net();
        let r = PlaceRelation::named(&n, &[("s1", "s4"), ("0", "s5"), ("s3", "0")]);
        assert_eq!(r.kind(), RelationKind::DExtended);
        assert_eq!(r.restrict_bar(), PlaceRelation::named(&n, &[("s1", "s4")]));
        let p = PlaceRelation::named(&n, &[("s1", "s2")]);
        assert_eq!(p.restrict_bar(), p);
        assert!(PlaceRelation::named(&n, &[("0", "s5")]).restrict_bar().is_empty());
    }

    #[test]
    fn theta_theta_rejected() {
        let mut r = PlaceRelation::new();
        assert_eq!(r.insert(PlaceOrTheta::Theta, PlaceOrTheta::Theta), Err(RelationError::ThetaTheta));
    }

    #[test]
    fn algebra_examples() {
        let n = net();
        let r = PlaceRelation::named(&n, &[("s1", "s3")]);
        assert_eq!(r.inverse(), PlaceRelation::named(&n, &[("s3", "s1")]));
        let r2 = PlaceRelation::named(&n, &[("s3", "s6")]);
        assert_eq!(r.compose(&r2), PlaceRelation::named(&n, &[("s1", "s6")]));
        assert_eq!(PlaceRelation::identity(&n).len(), 6);
    }

    #[test]
    fn compose_passes_theta_through() {
        let n = net();
        let r1 = PlaceRelation::named(&n, &[("s1", "0"), ("0", "s2")]);
        let r2 = PlaceRelation::named(&n, &[("s2", "s3"), ("0", "s4")]);
        let c = r1.compose(&r2);
        assert!(c.contains(PlaceOrTheta::Place(n.place("s1").unwrap()), PlaceOrTheta::Theta));
        assert!(c.contains(PlaceOrTheta::Theta, PlaceOrTheta::Place(n.place("s3").unwrap())));
        assert!(c.contains(PlaceOrTheta::Theta, PlaceOrTheta::Place(n.place("s4").unwrap())));
        // s1 to θ, then θ to s4
        assert!(c.contains(PlaceOrTheta::Place(n.place("s1").unwrap()), PlaceOrTheta::Place(n.place("s4").unwrap())));
        assert_eq!(c.len(), 4);
    }
}
