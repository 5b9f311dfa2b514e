// Branching place bisimilarity on the producer/consumer nets: verify a
// given relation, then let the guided search build one.
//
// `cargo run --example branching_case_study`

use std::error::Error;

use pneq::checkers::{decide, verify, Caps, EquivalenceKind, Mode, Status};
use pneq::io::{corpus_file, corpus_net, parse_marking, parse_relation};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = corpus_net("case6.pn");
    let rel = parse_relation(corpus_file("case6.rel").unwrap(), &net)?;
    let m1 = parse_marking("init1", &net)?;
    let m2 = parse_marking("init2", &net)?;

    let v = verify(&net, &rel, EquivalenceKind::BranchingPlace, &m1, &m2)?;
    println!("given relation: {}", v.status);
    assert_eq!(v.status, Status::Related);

    // 72 candidate pairs: too many to enumerate, so auto mode goes guided
    let v = decide(&net, &m1, &m2, EquivalenceKind::BranchingPlace, Mode::Auto, &Caps::default())?;
    println!("search: {} via {:?}, universe {}", v.status, v.mode_used, v.stats.universe_size);
    if let Some(w) = &v.witness {
        println!("witness with {} pairs: {}", w.len(), w.display(&net));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
