//! The `res` command line.
//!
//! Exit status is 0 on success, 1 for usage, parse and declaration errors
//! (including an unsatisfiable `--given`), and 2 when `check` finds that the
//! declared relations contradict the closure.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::dsl::{parse_document, StructureDocument};
use super::render::{self, pretty, CheckSummary};
use crate::conditioning::{condition, ConditionedStructure};
use crate::decision;
use crate::error::Error;
use crate::order::OrderClosure;
use crate::semantics::{ConclusionFrame, ConclusionSentence};
use crate::structure::EvidenceStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    /// Graphviz; `diagram` only.
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum CandidateSet {
    #[default]
    Singletons,
    #[value(name = "singletons+complements")]
    SingletonsAndComplements,
    /// Every subset of the alternatives; at most five alternatives.
    All,
}

impl CandidateSet {
    pub fn expand(self, frame: &ConclusionFrame) -> Result<Vec<ConclusionSentence>, Error> {
        let n = frame.len();
        let mut out: Vec<ConclusionSentence> = Vec::new();
        let mut push = |p: ConclusionSentence| {
            if !out.iter().any(|q| q.mask() == p.mask()) {
                out.push(p);
            }
        };
        match self {
            CandidateSet::Singletons => (0..n).for_each(|i| push(frame.singleton(i))),
            CandidateSet::SingletonsAndComplements => {
                (0..n).for_each(|i| push(frame.singleton(i)));
                (0..n).for_each(|i| push(frame.singleton(i).complement()));
            }
            CandidateSet::All => {
                if n > 5 {
                    return Err(Error::Usage(format!(
                        "--candidates all needs at most 5 alternatives, the structure has {n}"
                    )));
                }
                (0..1u32 << n).for_each(|m| push(frame.from_mask(m).expect("mask within frame")));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Check,
    Condition,
    Compare { first: String, second: String },
    Rank,
    Plausible { conclusion: String },
    Diagram,
    Explain { first: String, second: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Condition => "condition",
            Command::Compare { .. } => "compare",
            Command::Rank => "rank",
            Command::Plausible { .. } => "plausible",
            Command::Diagram => "diagram",
            Command::Explain { .. } => "explain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRequest {
    pub command: Command,
    pub given: Option<String>,
    pub format: OutputFormat,
    pub candidates: CandidateSet,
    pub overrides: Vec<(String, String)>,
}

impl QueryRequest {
    pub fn new(command: Command) -> Self {
        QueryRequest {
            command,
            given: None,
            format: OutputFormat::Text,
            candidates: CandidateSet::Singletons,
            overrides: Vec::new(),
        }
    }

    pub fn given(mut self, given: &str) -> Self {
        self.given = Some(given.to_string());
        self
    }

    pub fn format(mut self, format: OutputFormat) -> Self {
        self.format = format;
        self
    }

    pub fn candidates(mut self, candidates: CandidateSet) -> Self {
        self.candidates = candidates;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryOutput {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

impl QueryOutput {
    fn ok(stdout: String) -> Self {
        QueryOutput { stdout, stderr: String::new(), exit_code: 0 }
    }

    fn fail(message: impl std::fmt::Display) -> Self {
        let mut stderr = format!("error: {message}");
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        QueryOutput { stdout: String::new(), stderr, exit_code: 1 }
    }
}

/// Runs one query against a parsed document.
pub fn run_query(doc: &StructureDocument, req: &QueryRequest) -> QueryOutput {
    let structure = match doc.build(&req.overrides) {
        Ok(s) => s,
        Err(errors) => return QueryOutput::fail(errors),
    };
    if req.format == OutputFormat::Dot && req.command != Command::Diagram {
        return QueryOutput::fail("--format dot is only available for diagram");
    }
    let closure = OrderClosure::build(&structure);
    if req.command == Command::Check {
        return check(doc, &structure, &closure, req.format);
    }
    let Some(given) = req.given.as_deref() else {
        return QueryOutput::fail(format!("{} needs --given", req.command.name()));
    };
    let cond = match structure.evidence_frame().parse(given).and_then(|e| condition(&structure, &closure, &e)) {
        Ok(c) => c,
        Err(e) => return QueryOutput::fail(e),
    };
    match query(&cond, given, req) {
        Ok(stdout) => QueryOutput::ok(stdout),
        Err(e) => QueryOutput::fail(e),
    }
}

fn check(doc: &StructureDocument, s: &EvidenceStructure, closure: &OrderClosure, format: OutputFormat) -> QueryOutput {
    let consistency = closure.check_consistency(s);
    let summary = CheckSummary {
        name: &doc.name,
        structure: s,
        validation: s.report(),
        consistency: &consistency,
        missing_disjunctions: s.missing_disjunctions().len(),
    };
    let stdout = match format {
        OutputFormat::Json => pretty(render::check_json(&summary)),
        _ => render::check_text(&summary),
    };
    QueryOutput { stdout, stderr: String::new(), exit_code: if consistency.is_consistent() { 0 } else { 2 } }
}

fn query(cond: &ConditionedStructure<'_>, given: &str, req: &QueryRequest) -> Result<String, Error> {
    let frame = cond.structure().conclusion_frame();
    let json = req.format == OutputFormat::Json;
    Ok(match &req.command {
        Command::Check => unreachable!("handled before conditioning"),
        Command::Condition => {
            if json {
                pretty(render::condition_json(cond, given))
            } else {
                render::condition_text(cond, given)
            }
        }
        Command::Compare { first, second } => {
            let (p1, p2) = (frame.parse(first)?, frame.parse(second)?);
            let verdict = decision::compare(cond, &p1, &p2)?;
            if json {
                pretty(render::compare_json(given, &p1, &p2, verdict))
            } else {
                render::compare_text(&p1, &p2, verdict)
            }
        }
        Command::Rank => {
            let ranking = decision::rank(cond, &req.candidates.expand(frame)?)?;
            if json {
                pretty(render::rank_json(given, &ranking))
            } else {
                render::rank_text(cond, given, &ranking)
            }
        }
        Command::Plausible { conclusion } => {
            let p = frame.parse(conclusion)?;
            let plausible = decision::is_plausible(cond, &p)?;
            if json {
                let verdict = decision::compare(cond, &p.complement(), &p)?;
                pretty(render::plausible_json(given, &p, plausible, verdict))
            } else {
                render::plausible_text(&p, plausible)
            }
        }
        Command::Diagram => {
            let diagram = decision::hasse(cond, &req.candidates.expand(frame)?)?;
            match req.format {
                OutputFormat::Dot => diagram.to_dot(),
                OutputFormat::Json => pretty(render::diagram_json(given, &diagram)),
                OutputFormat::Text => render::diagram_text(cond, given, &diagram),
            }
        }
        Command::Explain { first, second } => {
            let (p1, p2) = (frame.parse(first)?, frame.parse(second)?);
            let trace = decision::explain(cond, &p1, &p2)?;
            if json {
                pretty(render::explain_json(cond, given, &trace))
            } else {
                render::explain_text(cond, given, &trace)
            }
        }
    })
}

/// Structures shipped with the binary, used when the named file does not exist.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "example1.res" => Some(include_str!("../../fixtures/example1.res")),
        "hominids.res" => Some(include_str!("../../fixtures/hominids.res")),
        "hominids-lifting.res" => Some(include_str!("../../fixtures/hominids-lifting.res")),
        _ => None,
    }
}

fn load(file: &str) -> Result<String, String> {
    match std::fs::read_to_string(file) {
        Ok(text) => Ok(text),
        Err(e) => {
            let base = Path::new(file).file_name().and_then(|n| n.to_str()).unwrap_or(file);
            if !Path::new(file).exists() {
                if let Some(text) = bundled(base) {
                    return Ok(text.to_string());
                }
            }
            Err(format!("cannot read {file}: {e}"))
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "res", version, about = "Qualitative evidential reasoning over argument structures")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct Common {
    /// Structure file; the bundled example1.res, hominids.res and
    /// hominids-lifting.res are used when no such file exists.
    file: String,
    /// Evidence formula to condition on.
    #[arg(long)]
    given: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
    /// Conclusions ranked or drawn by rank and diagram.
    #[arg(long, value_enum, default_value_t)]
    candidates: CandidateSet,
    /// Override a structure option, as KEY=VALUE.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Validate a structure and check the declared relations for consistency.
    Check(Common),
    /// List the arguments triggered by the given evidence.
    Condition(Common),
    /// Compare the believability of two conclusions.
    Compare {
        #[command(flatten)]
        common: Common,
        first: String,
        second: String,
    },
    /// Pairwise verdicts, maximal elements and strata over candidate conclusions.
    Rank(Common),
    /// Decide whether a conclusion is more believable than its complement.
    Plausible {
        #[command(flatten)]
        common: Common,
        conclusion: String,
    },
    /// Hasse diagram of the candidate conclusions.
    Diagram(Common),
    /// Show which supports match which, and why.
    Explain {
        #[command(flatten)]
        common: Common,
        first: String,
        second: String,
    },
}

fn request(sub: Sub) -> Result<(String, QueryRequest), String> {
    let (common, command) = match sub {
        Sub::Check(c) => (c, Command::Check),
        Sub::Condition(c) => (c, Command::Condition),
        Sub::Compare { common, first, second } => (common, Command::Compare { first, second }),
        Sub::Rank(c) => (c, Command::Rank),
        Sub::Plausible { common, conclusion } => (common, Command::Plausible { conclusion }),
        Sub::Diagram(c) => (c, Command::Diagram),
        Sub::Explain { common, first, second } => (common, Command::Explain { first, second }),
    };
    let overrides = common
        .set
        .iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| format!("--set expects KEY=VALUE, got {kv:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let req =
        QueryRequest { command, given: common.given, format: common.format, candidates: common.candidates, overrides };
    Ok((common.file, req))
}

/// Parses `args` (including the program name), runs the query and returns
/// its output.
pub fn run_cli<I, T>(args: I) -> QueryOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                QueryOutput::ok(text)
            } else {
                QueryOutput { stdout: String::new(), stderr: text, exit_code: 1 }
            };
        }
    };
    let (file, req) = match request(cli.command) {
        Ok(r) => r,
        Err(e) => return QueryOutput::fail(e),
    };
    let text = match load(&file) {
        Ok(t) => t,
        Err(e) => return QueryOutput::fail(e),
    };
    match parse_document(&text) {
        Ok(doc) => run_query(&doc, &req),
        Err(errors) => QueryOutput::fail(format!("{file}:\n{errors}")),
    }
}

/// Entry point for the binary: writes the output streams and returns the
/// exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let output = run_cli(args);
    // a closed pipe is not worth reporting
    let _ = out.write_all(output.stdout.as_bytes());
    let _ = err.write_all(output.stderr.as_bytes());
    output.exit_code
}
