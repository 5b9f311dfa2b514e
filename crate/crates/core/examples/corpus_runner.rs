// Runs the embedded corpus and prints one line per case.
//
// `cargo run --release --example corpus_runner`

use std::error::Error;

use pneq::io::run_corpus;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let outcomes = run_corpus(false);
    for o in &outcomes {
        let got = o.actual.map(|s| s.to_string()).unwrap_or_else(|| "skipped".into());
        println!("{:<22} expected {:<12} got {:<12} {:>6} ms", o.name, o.expected.to_string(), got, o.wall_ms);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(format!("{failed} corpus cases failed").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
