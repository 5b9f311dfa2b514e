// Checking candidate place bisimulations and deciding place bisimilarity
// by relation enumeration.
//
// `cargo run --example place_bisimulation`

use std::error::Error;

use pneq::checkers::{check_relation, decide, Caps, EquivalenceKind, Mode, Status};
use pneq::io::{corpus_net, parse_marking};
use pneq::PlaceRelation;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = corpus_net("fig1.pn");
    let r1 = PlaceRelation::identity(&net);
    let r2 = PlaceRelation::named(&net, &[("s1", "s2"), ("s2", "s1"), ("s3", "s3")]);
    for (name, r) in [("r1", &r1), ("r2", &r2)] {
        let rep = check_relation(&net, r, EquivalenceKind::Place)?;
        println!("{name}: ok = {}", rep.ok);
    }

    // place bisimulations are not closed under union
    let rep = check_relation(&net, &r1.union(&r2), EquivalenceKind::Place)?;
    assert!(!rep.ok);
    let v = &rep.violations[0];
    println!(
        "union fails: {} cannot be answered from {}",
        net.transition(v.transition).name,
        net.format_marking(&v.opposing)
    );

    let caps = Caps::default();
    let s1 = net.marking_of(&["s1"]);
    let s2 = net.marking_of(&["s2"]);
    let verdict = decide(&net, &s1, &s2, EquivalenceKind::Place, Mode::Exhaustive, &caps)?;
    println!("s1 vs s2: {} with {}", verdict.status, verdict.witness.as_ref().unwrap().display(&net));

    // the one-step game succeeds componentwise, yet no relation works
    let net2 = corpus_net("fig2.pn");
    let (m1, m2) = (parse_marking("m1", &net2)?, parse_marking("m2", &net2)?);
    let verdict = decide(&net2, &m1, &m2, EquivalenceKind::Place, Mode::Exhaustive, &caps)?;
    assert_eq!(verdict.status, Status::NotRelated);
    println!("fig2: {} after {} relations", verdict.status, verdict.stats.relations_examined);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
