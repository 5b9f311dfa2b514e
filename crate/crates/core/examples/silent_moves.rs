// Searching for silent responses: an idle reply and a reply that moves a
// token through a τ step before the matching transition.
//
// `cargo run --example silent_moves`

use std::error::Error;

use pneq::io::{corpus_file, corpus_net, parse_relation};
use pneq::silent::{find_silent_response, psi_holds, silent_graph, Direction, GoalSpec, SilentStep, DEFAULT_NODE_BUDGET};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = corpus_net("case6.pn");
    let rel = parse_relation(corpus_file("case6.rel").unwrap(), &net)?;

    for (from, _, to) in silent_graph(&net).edges() {
        println!("silent edge {} -> {}", net.place_name(from), net.place_name(to));
    }

    let p1 = net.transition_by_name("p1").unwrap();
    let start = net.marking_of(&["P1'"]);
    let goal = GoalSpec::Either { transition: p1.id };
    let w = find_silent_response(&net, &rel, &p1.pre, &start, Direction::Psi, goal, DEFAULT_NODE_BUDGET)?
        .ok_or("no reply to p1")?;
    assert!(matches!(w.blocks[0][..], [SilentStep::Idle(_)]));
    println!("p1 answered by idling at P1'");

    let c5 = net.transition_by_name("c5").unwrap();
    let d5 = net.transition_by_name("d5").unwrap();
    let goal = GoalSpec::Or { matched: c5.id, target: d5.id };
    let w = find_silent_response(&net, &rel, &c5.pre, &net.marking_of(&["C1'"]), Direction::Psi, goal, DEFAULT_NODE_BUDGET)?
        .ok_or("no reply to c5")?;
    let path: Vec<String> = w.intermediates.iter().map(|m| net.format_marking(m)).collect();
    println!("c5 answered after {}", path.join(" => "));
    assert!(psi_holds(&net, &c5.pre, &w, &rel, Direction::Psi)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
