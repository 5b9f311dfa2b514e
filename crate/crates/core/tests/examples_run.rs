macro_rules! example {
    ($m:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $m {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(closure_matching, "closure_matching.rs");
example!(place_bisimulation, "place_bisimulation.rs");
example!(branching_case_study, "branching_case_study.rs");
example!(silent_moves, "silent_moves.rs");
example!(d_place, "d_place.rs");
example!(interleaving_oracle, "interleaving_oracle.rs");
example!(dot_export, "dot_export.rs");
example!(corpus_runner, "corpus_runner.rs");

#[test]
fn closure_matching_runs() {
    closure_matching::run_example().unwrap();
}

#[test]
fn place_bisimulation_runs() {
    place_bisimulation::run_example().unwrap();
}

#[test]
fn branching_case_study_runs() {
    branching_case_study::run_example().unwrap();
}

#[test]
fn silent_moves_runs() {
    silent_moves::run_example().unwrap();
}

#[test]
fn d_place_runs() {
    d_place::run_example().unwrap();
}

#[test]
fn interleaving_oracle_runs() {
    interleaving_oracle::run_example().unwrap();
}

#[test]
fn dot_export_runs() {
    dot_export::run_example().unwrap();
}

#[test]
fn corpus_runner_runs() {
    corpus_runner::run_example().unwrap();
}
