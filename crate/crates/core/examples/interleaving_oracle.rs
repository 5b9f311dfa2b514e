// Reachability graphs and interleaving bisimilarity, the coarser
// equivalences the place-based ones refine.
//
// `cargo run --example interleaving_oracle`

use std::error::Error;

use pneq::checkers::{decide, Caps, EquivalenceKind, Mode};
use pneq::io::corpus_net;
use pneq::net::reach_lts;
use pneq::oracle::{interleaving_equivalent, joint_lts, strong_partition};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = corpus_net("fig10.pn");
    let (s1, s4) = (net.marking_of(&["s1"]), net.marking_of(&["s4"]));

    let lts = reach_lts(&net, std::slice::from_ref(&s1), 100, 1000)?;
    println!("from s1: {} states, {} edges", lts.states.len(), lts.edges.len());

    let (joint, i, j) = joint_lts(&net, &s1, &s4, 100)?;
    let blocks = strong_partition(&joint);
    println!("s1 and s4 in blocks {} and {}", blocks[i], blocks[j]);

    // two tokens each: s2+s3 enables c on the left only
    let two1 = s1.scale(2)?;
    let two4 = s4.scale(2)?;
    println!("2*s1 vs 2*s4: {}", interleaving_equivalent(&net, &two1, &two4, false, 1000)?);

    let v = decide(&net, &s1, &s4, EquivalenceKind::Place, Mode::Exhaustive, &Caps::default())?;
    println!("place bisimilar s1 vs s4: {}", v.status);

    let net4 = corpus_net("fig4.pn");
    let same = interleaving_equivalent(&net4, &net4.marking_of(&["s2"]), &net4.marking_of(&["s5"]), true, 100)?;
    println!("fig4 s2 vs s5 branching interleaving: {same}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
