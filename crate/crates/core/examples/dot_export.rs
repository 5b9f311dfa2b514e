// Graphviz output of a reachability graph; silent edges are dashed.
//
// `cargo run --example dot_export > fig5.dot`

use std::error::Error;

use pneq::io::{corpus_net, parse_marking, to_dot};
use pneq::net::reach_lts;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = corpus_net("fig5.pn");
    let m0 = parse_marking("s6+s8", &net)?;
    let lts = reach_lts(&net, &[m0], 100, 1000)?;
    let dot = to_dot(&net, &lts);
    assert!(dot.contains("style=dashed"));
    print!("{dot}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
