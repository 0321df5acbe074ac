//! The `sparqln3` command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{eval_query, select_to_tsv, QueryResult};
use crate::engine::{answer_select, saturate, EngineConfig};
use crate::error::{Error, ExitCode, Result};
use crate::fuzz::{check_pair, fuzz, Verdict};
use crate::gen;
use crate::n3::{parse_n3, serialize_n3, Mode, N3Doc, N3Gp, N3Rule};
use crate::prover::{prove, ProofConfig};
use crate::rdf::{parse_ntriples, parse_turtle, serialize_ntriples, Graph, Variable};
use crate::sparql::{parse_query, Query};
use crate::translate::{is_result_head, runtime_text, translation_document};

#[derive(Parser, Debug)]
#[command(name = "sparqln3", version, about = "Translate SPARQL queries into N3 rules and run them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Forward,
    Backward,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Translate a query file into a single-rule N3 file.
    Translate {
        query: PathBuf,
        out: PathBuf,
        /// Also write the runtime rules to this path.
        #[arg(long)]
        runtime: Option<PathBuf>,
        /// Write all nine runtime rules rather than only the union rules.
        #[arg(long)]
        emit_figure1: bool,
        #[arg(long, value_enum, default_value = "forward")]
        mode: ModeArg,
    },
    /// Evaluate a query with the reference evaluator.
    Query { query: PathBuf, data: PathBuf },
    /// Saturate data under rules and print the derived triples.
    Reason {
        data: PathBuf,
        #[arg(required = true)]
        rules: Vec<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Print one line per rule firing to stderr.
        #[arg(long)]
        trace: bool,
        /// Print SELECT answers as TSV instead of derived triples.
        #[arg(long)]
        select_decode: bool,
    },
    /// Answer a goal pattern by backward chaining.
    Solve {
        data: PathBuf,
        #[arg(required = true)]
        rules: Vec<PathBuf>,
        /// Triple patterns in N3 syntax, e.g. `?x a <urn:c>`.
        #[arg(long)]
        goal: String,
    },
    /// Compare the reference evaluator against the translated rule.
    Check {
        query: Option<PathBuf>,
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run this many generated cases instead of the given files.
        #[arg(long)]
        fuzz: Option<usize>,
    },
    /// Write synthetic data plus its query and rule files.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Deep Taxonomy class hierarchy.
    Dt {
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        width: usize,
        out: PathBuf,
    },
    /// A linear `link` chain.
    Chain {
        #[arg(long)]
        length: usize,
        out: PathBuf,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::Usage.code() } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(code) => code.code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code().code()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn io(e: std::io::Error) -> Error {
    Error::Io { path: "<output>".into(), source: e }
}

/// Reads a data file: N-Triples for `.nt`, Turtle otherwise.
pub fn load_data(path: &Path) -> Result<Graph> {
    let text = read(path)?;
    let g = if path.extension().is_some_and(|e| e == "nt") { parse_ntriples(&text)? } else { parse_turtle(&text)? };
    Ok(g)
}

pub fn load_query(path: &Path) -> Result<Query> {
    Ok(parse_query(&read(path)?)?)
}

/// Reads and concatenates rule files, keeping every prefix seen.
pub fn load_rules(paths: &[PathBuf]) -> Result<N3Doc> {
    let mut doc = N3Doc::new();
    for p in paths {
        let d = parse_n3(&read(p)?)?;
        for (prefix, ns) in &d.prefixes {
            doc.add_prefix(prefix, ns);
        }
        doc.rules.extend(d.rules);
    }
    Ok(doc)
}

/// Parses a goal such as `?x a :C` using the prefixes of `doc`.
pub fn parse_goal(goal: &str, doc: &N3Doc) -> Result<N3Gp> {
    let mut text = String::new();
    for (p, ns) in crate::n3::vocab::STANDARD_PREFIXES {
        text.push_str(&format!("@prefix {p}: <{ns}>.\n"));
    }
    for (p, ns) in &doc.prefixes {
        text.push_str(&format!("@prefix {p}: <{ns}>.\n"));
    }
    text.push_str(&format!("{{ {goal} }} => {{ }}.\n"));
    let parsed = parse_n3(&text)?;
    match parsed.rules.into_iter().next() {
        Some(r) if parsed.facts.is_empty() => Ok(r.premise),
        _ => Err(Error::Usage(format!("goal is not a triple pattern: {goal}"))),
    }
}

fn ntriples(g: &Graph) -> Result<String> {
    let clean: Graph = g.iter().filter(|t| t.is_well_formed()).cloned().collect();
    serialize_ntriples(&clean)
}

/// Runs one parsed command, writing results to `out` and diagnostics to
/// `err`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> Result<ExitCode> {
    match cli.command {
        Command::Translate { query, out: target, runtime, emit_figure1, mode } => {
            let q = load_query(&query)?;
            let mode = match mode {
                ModeArg::Forward => Mode::Forward,
                ModeArg::Backward => Mode::Backward,
            };
            let doc = translation_document(&q, mode)?;
            write(&target, &serialize_n3(&doc))?;
            let runtime = runtime.or_else(|| emit_figure1.then(|| target.with_file_name("runtime.n3")));
            if let Some(path) = runtime {
                write(&path, &runtime_text(emit_figure1))?;
            }
            Ok(ExitCode::Success)
        }
        Command::Query { query, data } => {
            let q = load_query(&query)?;
            let g = load_data(&data)?;
            let text = match eval_query(&q, &g)? {
                QueryResult::Select { vars, rows } => select_to_tsv(&vars, &rows),
                QueryResult::Construct(graph) => ntriples(&graph)?,
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(ExitCode::Success)
        }
        Command::Reason { data, rules, max_iter, trace, select_decode } => {
            let g = load_data(&data)?;
            let doc = load_rules(&rules)?;
            let cfg = EngineConfig { max_iterations: max_iter, trace };
            let start = Instant::now();
            let fb = saturate(&g, &doc.rules, &cfg)?;
            for line in &fb.trace {
                writeln!(err, "{line}").map_err(io)?;
            }
            writeln!(
                err,
                "iterations={} strata={} firings={} facts={} elapsed_ms={}",
                fb.iterations,
                fb.strata,
                fb.firings,
                fb.facts.len(),
                start.elapsed().as_millis()
            )
            .map_err(io)?;
            if select_decode {
                for rule in doc.rules.iter().filter(|r| is_result_head(&r.conclusion)) {
                    let rows = answer_select(&fb, &rule.conclusion)?;
                    out.write_all(select_to_tsv(&result_vars(rule), &rows).as_bytes()).map_err(io)?;
                }
            } else {
                let derived: Graph = fb.facts.iter().filter(|t| !g.contains(t)).cloned().collect();
                out.write_all(ntriples(&derived)?.as_bytes()).map_err(io)?;
            }
            Ok(ExitCode::Success)
        }
        Command::Solve { data, rules, goal } => {
            let g = load_data(&data)?;
            let doc = load_rules(&rules)?;
            let goal = parse_goal(&goal, &doc)?;
            let proof = prove(&g, &doc.rules, &goal, &ProofConfig::default())?;
            let vars: Vec<Variable> = goal.vars().into_iter().collect();
            out.write_all(select_to_tsv(&vars, &proof.answers).as_bytes()).map_err(io)?;
            writeln!(err, "expansions={}", proof.expansions).map_err(io)?;
            Ok(ExitCode::Success)
        }
        Command::Check { query, data, seed, fuzz: cases } => {
            if let Some(n) = cases {
                let report = fuzz(n, seed);
                writeln!(
                    err,
                    "cases={} select={} construct={} max_depth={} max_triples={} constructors={}",
                    report.cases,
                    report.selects,
                    report.constructs,
                    report.max_depth,
                    report.max_triples,
                    report.constructors.iter().copied().collect::<Vec<_>>().join(",")
                )
                .map_err(io)?;
                return Ok(match report.failure {
                    Some(r) => {
                        write!(out, "{r}").map_err(io)?;
                        ExitCode::Mismatch
                    }
                    None => ExitCode::Success,
                });
            }
            let (Some(query), Some(data)) = (query, data) else {
                return Err(Error::Usage("check needs QUERY and DATA, or --fuzz N".into()));
            };
            let q = load_query(&query)?;
            let g = load_data(&data)?;
            match check_pair(&q, &g)? {
                Verdict::Agree => Ok(ExitCode::Success),
                Verdict::Mismatch(diff) => {
                    out.write_all(diff.as_bytes()).map_err(io)?;
                    Ok(ExitCode::Mismatch)
                }
            }
        }
        Command::Gen { kind } => {
            let (graph, target, queries) = match kind {
                GenKind::Dt { depth, width, out } => (
                    gen::deep_taxonomy(depth, width),
                    out,
                    vec![("", gen::CAX_SCO_QUERY), ("-members", gen::DT_GOAL_QUERY)],
                ),
                GenKind::Chain { length, out } => (gen::chain(length), out, vec![("", gen::TRANSITIVITY_QUERY)]),
            };
            write(&target, &serialize_ntriples(&graph)?)?;
            for (suffix, text) in queries {
                let q = parse_query(text)?;
                let doc = translation_document(&q, Mode::Forward)?;
                let stem = target.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                write(&target.with_file_name(format!("{stem}{suffix}.rq")), text)?;
                write(&target.with_file_name(format!("{stem}{suffix}.n3")), &serialize_n3(&doc))?;
            }
            Ok(ExitCode::Success)
        }
    }
}

/// Column order of a SELECT rule's result head.
fn result_vars(rule: &N3Rule) -> Vec<Variable> {
    use crate::n3::N3Term;
    use crate::rdf::Term;
    let mut vars = Vec::new();
    for t in rule.conclusion.iter() {
        if let N3Term::List(pairs) = &t.object {
            for p in pairs {
                if let N3Term::List(kv) = p {
                    if let Some(N3Term::Atomic(Term::Literal(l))) = kv.first() {
                        vars.push(Variable::new(l.lexical.clone()));
                    }
                }
            }
        }
    }
    vars
}
