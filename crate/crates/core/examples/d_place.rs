// The d-variants, where tokens may be related to θ.
//
// `cargo run --example d_place`

use std::error::Error;

use pneq::checkers::{decide, verify, Caps, EquivalenceKind, Mode, Status};
use pneq::io::{corpus_file, corpus_net, parse_marking, parse_relation};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let caps = Caps::default();

    // one token against two: place bisimilarity rejects outright
    let net = corpus_net("fig7.pn");
    let (m1, m2) = (parse_marking("s1", &net)?, parse_marking("s3+s4", &net)?);
    let v = decide(&net, &m1, &m2, EquivalenceKind::Place, Mode::Exhaustive, &caps)?;
    println!("fig7 place: {} ({:?})", v.status, v.mode_used);
    let v = decide(&net, &m1, &m2, EquivalenceKind::DPlace, Mode::Exhaustive, &caps)?;
    println!("fig7 d-place: {} after {} relations", v.status, v.stats.relations_examined);
    assert_eq!(v.status, Status::NotRelated);

    for (pn, rel, kind, a, b) in [
        ("fig8.pn", "fig8.rel", EquivalenceKind::DPlace, "s1", "s4"),
        ("fig9.pn", "fig9.rel", EquivalenceKind::DPlace, "s1", "s2+s3"),
        ("bdplace.pn", "bdplace.rel", EquivalenceKind::BranchingDPlace, "s1", "s4+s5"),
    ] {
        let net = corpus_net(pn);
        let r = parse_relation(corpus_file(rel).unwrap(), &net)?;
        let v = verify(&net, &r, kind, &parse_marking(a, &net)?, &parse_marking(b, &net)?)?;
        println!("{pn} {kind} {a} vs {b}: {}", v.status);
        assert_eq!(v.status, Status::Related);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
