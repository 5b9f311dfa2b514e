//! The `pneq` command line. [`run`] takes the arguments and output streams
//! so it can be driven from tests.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::checkers::{decide, verify, Caps, CheckError, EquivalenceKind, Mode, ModeUsed, Stats, Status, Verdict};
use crate::io::{parse_marking, parse_net, parse_relation, run_corpus, to_dot, JsonReport, QueryEcho};
use crate::net::{reach_lts, Marking, Net, NetError};
use crate::oracle::interleaving_equivalent;
use crate::relations::{additive_member, d_additive_member};
use crate::silent::SilentError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_RELATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pneq", version, about = "Place-based bisimilarity checks for P/T nets")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether two markings are equivalent.
    Check(CheckArgs),
    /// Verify a given relation and the membership of the two markings.
    Verify(VerifyArgs),
    /// Test membership of two markings in the closure of a relation.
    Closure(ClosureArgs),
    /// Build the reachability graph of a marking.
    Lts(LtsArgs),
    /// Run the embedded example corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Eq {
    Place,
    Dplace,
    Bplace,
    Bdplace,
    Int,
    Bint,
}

impl Eq {
    fn kind(self) -> Option<EquivalenceKind> {
        match self {
            Eq::Place => Some(EquivalenceKind::Place),
            Eq::Dplace => Some(EquivalenceKind::DPlace),
            Eq::Bplace => Some(EquivalenceKind::BranchingPlace),
            Eq::Bdplace => Some(EquivalenceKind::BranchingDPlace),
            Eq::Int | Eq::Bint => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Eq::Int => "int",
            Eq::Bint => "bint",
            other => other.kind().map(|k| k.as_str()).unwrap_or(""),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Guided,
    Auto,
}

#[derive(Args, Debug)]
struct Query {
    net: PathBuf,
    m1: String,
    m2: String,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, value_enum)]
    eq: Eq,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    #[arg(long, default_value_t = 22)]
    max_pairs: usize,
    /// State cap for the int/bint oracles.
    #[arg(long, default_value_t = 100_000)]
    state_cap: usize,
    #[arg(long, default_value_t = crate::silent::DEFAULT_NODE_BUDGET)]
    node_budget: usize,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    query: Query,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    eq: Eq,
    #[arg(long)]
    relation: PathBuf,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    query: Query,
}

#[derive(Args, Debug)]
struct ClosureArgs {
    /// Use the d-additive closure.
    #[arg(long)]
    d: bool,
    #[arg(long)]
    relation: PathBuf,
    #[command(flatten)]
    query: Query,
}

#[derive(Args, Debug)]
struct LtsArgs {
    #[arg(long)]
    cap: usize,
    #[arg(long)]
    dot: Option<PathBuf>,
    net: PathBuf,
    m0: String,
}

#[derive(Subcommand, Debug)]
enum CorpusAction {
    Run {
        #[arg(long)]
        include_slow: bool,
        #[arg(long)]
        json: bool,
    },
}

/// A failure mapped to an exit code.
struct Failure(i32, String);

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        let code = match &e {
            CheckError::Silent(SilentError::BudgetExhausted(_)) | CheckError::UniverseTooLarge(_) => EXIT_UNKNOWN,
            CheckError::Net(NetError::CapExceeded { .. }) => EXIT_UNKNOWN,
            CheckError::InvalidWitness => EXIT_UNKNOWN,
            _ => EXIT_USAGE,
        };
        Failure(code, e.to_string())
    }
}

impl From<NetError> for Failure {
    fn from(e: NetError) -> Self {
        let code = if matches!(e, NetError::CapExceeded { .. }) { EXIT_UNKNOWN } else { EXIT_USAGE };
        Failure(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_net(path: &Path) -> Result<Net, Failure> {
    parse_net(&read(path)?).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_markings(net: &Net, q: &Query) -> Result<(Marking, Marking), Failure> {
    let m = |s: &str| parse_marking(s, net).map_err(|e| Failure(EXIT_USAGE, format!("marking `{s}`: {e}")));
    Ok((m(&q.m1)?, m(&q.m2)?))
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Related => EXIT_OK,
        Status::NotRelated => EXIT_NOT_RELATED,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

fn print_verdict(out: &mut dyn Write, net: &Net, command: &str, echo: QueryEcho, v: &Verdict, json: bool) -> std::io::Result<()> {
    if json {
        return writeln!(out, "{}", JsonReport::from_verdict(net, command, echo, v).to_json());
    }
    writeln!(out, "{}", v.status)?;
    if let Some(note) = &v.note {
        writeln!(out, "note: {note}")?;
    }
    if let Some(w) = &v.witness {
        writeln!(out, "witness: {}", w.display(net))?;
    }
    for x in &v.violations {
        writeln!(
            out,
            "violation: {} (side {}) against {}: {}",
            net.transition(x.transition).name,
            x.side,
            net.format_marking(&x.opposing),
            x.details
        )?;
    }
    writeln!(
        out,
        "stats: {} relations, {} matchings, universe {}, {} ms",
        v.stats.relations_examined, v.stats.matchings_solved, v.stats.universe_size, v.stats.wall_ms
    )
}

fn echo(net: &Net, eq: Eq, mode: &str, q: &Query) -> QueryEcho {
    QueryEcho { net: net.name().to_string(), kind: eq.name().to_string(), mode: mode.to_string(), m1: q.m1.clone(), m2: q.m2.clone() }
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let net = load_net(&a.query.net)?;
    let (m1, m2) = load_markings(&net, &a.query)?;
    let verdict = match a.eq.kind() {
        None => {
            let start = std::time::Instant::now();
            let eq = interleaving_equivalent(&net, &m1, &m2, a.eq == Eq::Bint, a.state_cap)?;
            Verdict {
                status: if eq { Status::Related } else { Status::NotRelated },
                witness: None,
                mode_used: ModeUsed::Exhaustive,
                stats: Stats { wall_ms: start.elapsed().as_millis() as u64, ..Default::default() },
                note: Some("decided on the joint reachability graph".into()),
                violations: Vec::new(),
            }
        }
        Some(kind) => {
            let mode = match a.mode {
                ModeArg::Exhaustive => Mode::Exhaustive,
                ModeArg::Guided => Mode::Guided,
                ModeArg::Auto => Mode::Auto,
            };
            let caps = Caps {
                max_pairs: a.max_pairs,
                node_budget: a.node_budget,
                threads: a.threads,
                deterministic: a.deterministic,
                ..Caps::default()
            };
            decide(&net, &m1, &m2, kind, mode, &caps)?
        }
    };
    let mode = format!("{:?}", a.mode).to_lowercase();
    print_verdict(out, &net, "check", echo(&net, a.eq, &mode, &a.query), &verdict, a.json).map_err(io_fail)?;
    Ok(status_code(verdict.status))
}

fn io_fail(e: std::io::Error) -> Failure {
    Failure(EXIT_USAGE, e.to_string())
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let net = load_net(&a.query.net)?;
    let (m1, m2) = load_markings(&net, &a.query)?;
    let rel = parse_relation(&read(&a.relation)?, &net).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", a.relation.display())))?;
    let kind = a.eq.kind().ok_or(Failure(EXIT_USAGE, "verify needs a place-based equivalence".into()))?;
    let v = verify(&net, &rel, kind, &m1, &m2)?;
    print_verdict(out, &net, "verify", echo(&net, a.eq, "verify", &a.query), &v, a.json).map_err(io_fail)?;
    Ok(status_code(v.status))
}

fn cmd_closure(a: &ClosureArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let net = load_net(&a.query.net)?;
    let (m1, m2) = load_markings(&net, &a.query)?;
    let rel = parse_relation(&read(&a.relation)?, &net).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", a.relation.display())))?;
    let w = if a.d { d_additive_member(&rel, &m1, &m2) } else { additive_member(&rel, &m1, &m2) };
    match w {
        Some(w) => {
            writeln!(out, "member").map_err(io_fail)?;
            let pairs: Vec<String> =
                w.pairs.iter().map(|(x, y)| format!("({}, {})", x.display(&net), y.display(&net))).collect();
            writeln!(out, "witness: {}", pairs.join(" ")).map_err(io_fail)?;
            Ok(EXIT_OK)
        }
        None => {
            writeln!(out, "not a member").map_err(io_fail)?;
            Ok(EXIT_NOT_RELATED)
        }
    }
}

fn cmd_lts(a: &LtsArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let net = load_net(&a.net)?;
    let m0 = parse_marking(&a.m0, &net).map_err(|e| Failure(EXIT_USAGE, format!("marking `{}`: {e}", a.m0)))?;
    let lts = reach_lts(&net, &[m0], a.cap, a.cap.saturating_mul(64))?;
    writeln!(out, "{} states, {} edges", lts.states.len(), lts.edges.len()).map_err(io_fail)?;
    for (s, l, t) in &lts.edges {
        writeln!(out, "{} -{}-> {}", net.format_marking(&lts.states[*s]), l, net.format_marking(&lts.states[*t])).map_err(io_fail)?;
    }
    if let Some(path) = &a.dot {
        std::fs::write(path, to_dot(&net, &lts)).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

fn cmd_corpus(include_slow: bool, json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let outcomes = run_corpus(include_slow);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if json {
        let rows: Vec<serde_json::Value> = outcomes
            .iter()
            .map(|o| {
                serde_json::json!({
                    "name": o.name,
                    "expected": o.expected.to_string(),
                    "actual": o.actual.map(|s| s.to_string()),
                    "passed": o.passed,
                    "skipped": o.skipped,
                    "wall_ms": o.wall_ms,
                    "error": o.error,
                })
            })
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("json")).map_err(io_fail)?;
    } else {
        for o in &outcomes {
            let tag = if o.skipped {
                "SKIP"
            } else if o.passed {
                "PASS"
            } else {
                "FAIL"
            };
            let got = o.actual.map(|s| s.to_string()).or(o.error.clone()).unwrap_or_else(|| "-".into());
            writeln!(out, "{tag} {} expected {} got {} ({} ms)", o.name, o.expected, got, o.wall_ms).map_err(io_fail)?;
        }
        writeln!(out, "{} cases, {} failed", outcomes.len(), failed).map_err(io_fail)?;
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_NOT_RELATED })
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let res = match &cli.cmd {
        Command::Check(a) => cmd_check(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Closure(a) => cmd_closure(a, out),
        Command::Lts(a) => cmd_lts(a, out),
        Command::Corpus { action: CorpusAction::Run { include_slow, json } } => cmd_corpus(*include_slow, *json, out),
    };
    match res {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
