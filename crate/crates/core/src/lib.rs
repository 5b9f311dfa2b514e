//! Place-based behavioural equivalences for finite P/T nets with silent moves.
//!
//! The crate decides place bisimilarity and its d- and branching variants by
//! enumerating (or searching for) finite place relations, and cross-checks the
//! answers against interleaving bisimilarity on reachability graphs.
//!
//! ```
//! use pneq::checkers::{decide, Caps, EquivalenceKind, Mode, Status};
//! use pneq::io::parse_net;
//!
//! let net = parse_net("net n\nplace s1 s2 s3\ntrans t1 : s1 + s2 -> a -> s3\n").unwrap();
//! let (m1, m2) = (net.marking_of(&["s1"]), net.marking_of(&["s2"]));
//! let v = decide(&net, &m1, &m2, EquivalenceKind::Place, Mode::Exhaustive, &Caps::default()).unwrap();
//! assert_eq!(v.status, Status::Related);
//! ```

pub mod checkers;
pub mod cli;
pub mod io;
pub mod net;
pub mod oracle;
pub mod relations;
pub mod silent;

pub use checkers::{check_relation, decide, verify, Caps, EquivalenceKind, Mode, Status, Verdict};
pub use net::{Label, Marking, Net, NetBuilder, PlaceId, Transition, TransitionId};
pub use relations::{PlaceOrTheta, PlaceRelation};
