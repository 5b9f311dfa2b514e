// Membership in the additive and d-additive closures of a place relation.
//
// `cargo run --example closure_matching`

use std::error::Error;

use pneq::io::{corpus_file, parse_marking, parse_net, parse_relation};
use pneq::relations::{additive_member, d_additive_member, related_markings, Side};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = parse_net(corpus_file("matching.pn").unwrap())?;
    let rel = parse_relation(corpus_file("matching.rel").unwrap(), &net)?;
    let m1 = parse_marking("s1+s2", &net)?;
    let m2 = parse_marking("s4+s3", &net)?;

    // a greedy s1 -> s4 would strand s2 against s3; the matching finds the other way
    let w = additive_member(&rel, &m1, &m2).ok_or("expected a member")?;
    for (a, b) in &w.pairs {
        println!("{} ~ {}", a.display(&net), b.display(&net));
    }
    assert_eq!(w.projections(), (m1.clone(), m2.clone()));

    let partners = related_markings(&rel, &m1, Side::Left);
    let shown: Vec<String> = partners.iter().map(|m| net.format_marking(m)).collect();
    println!("markings related to s1+s2: {}", shown.join(", "));

    // with θ pairs, tokens may be matched against nothing
    let net9 = parse_net(corpus_file("fig9.pn").unwrap())?;
    let r9 = parse_relation(corpus_file("fig9.rel").unwrap(), &net9)?;
    let (a, b) = (parse_marking("s1", &net9)?, parse_marking("s2+s3", &net9)?);
    assert!(additive_member(&r9, &a, &b).is_none());
    let dw = d_additive_member(&r9, &a, &b).ok_or("expected a d-member")?;
    println!("d-closure: {} pairs used", dw.pairs.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
