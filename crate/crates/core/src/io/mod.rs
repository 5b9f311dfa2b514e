//! Text formats, reports and the embedded example corpus.

pub mod corpus;
pub mod dot;
pub mod parse;
pub mod report;

pub use corpus::{cases, corpus_file, corpus_files, corpus_net, run_case, run_case_with, run_corpus, CaseOutcome, CorpusCase};
pub use dot::to_dot;
pub use parse::{parse_marking, parse_net, parse_relation, write_net, write_relation, ParseError};
pub use report::{JsonReport, JsonViolation, QueryEcho};
