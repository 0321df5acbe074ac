//! C ABI over `sparqln3`.
//!
//! Objects cross the boundary as opaque handles created by `*_parse` or
//! `sn3_reason` and released by the matching `*_free`. Every fallible call
//! returns an [`Sn3Status`]; on failure [`sn3_last_error`] describes it.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`sn3_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sparqln3::algebra::{eval_query, select_to_tsv, QueryResult};
use sparqln3::engine::{saturate, EngineConfig};
use sparqln3::fuzz::{check_pair, Verdict};
use sparqln3::n3::{parse_n3, serialize_n3, Mode, N3Doc};
use sparqln3::prover::{prove, ProofConfig};
use sparqln3::rdf::{parse_ntriples, parse_turtle, serialize_ntriples, Graph, Variable};
use sparqln3::sparql::{parse_query, Query};
use sparqln3::translate::translation_document;
use sparqln3::{Error, ExitCode};

/// Result codes. Non-negative values equal the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sn3Status {
    Ok = 0,
    /// Differential check found a difference.
    Mismatch = 1,
    /// Syntax, validation or usage error.
    Invalid = 2,
    Unsupported = 3,
    Unstratifiable = 4,
    CapExceeded = 5,
    NullPointer = -1,
    InvalidUtf8 = -2,
    Panic = -3,
}

/// Input syntax for [`sn3_graph_parse`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sn3Format {
    NTriples = 0,
    Turtle = 1,
}

/// An RDF graph.
pub struct Sn3Graph(Graph);

/// A parsed SPARQL query.
pub struct Sn3Query(Query);

/// A set of N3 rules with their prefixes.
pub struct Sn3Rules(N3Doc);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(code: ExitCode) -> Sn3Status {
    match code {
        ExitCode::Success => Sn3Status::Ok,
        ExitCode::Mismatch => Sn3Status::Mismatch,
        ExitCode::Usage => Sn3Status::Invalid,
        ExitCode::Unsupported => Sn3Status::Unsupported,
        ExitCode::Unstratifiable => Sn3Status::Unstratifiable,
        ExitCode::CapExceeded => Sn3Status::CapExceeded,
    }
}

struct Failure(Sn3Status, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(e.exit_code()), e.to_string())
    }
}

fn fail<E: Into<Error>>(e: E) -> Failure {
    Failure::from(e.into())
}

/// Runs `f`, mapping errors and panics to a status and the last error.
fn guard(f: impl FnOnce() -> Result<Sn3Status, Failure>) -> Sn3Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            if s == Sn3Status::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Ok(Err(Failure(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            Sn3Status::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(Sn3Status::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(Sn3Status::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(Sn3Status::NullPointer, "null handle".into()))
}

fn out_ptr<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(Sn3Status::NullPointer, "null out-parameter".into()))
    } else {
        Ok(())
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<Sn3Status, Failure> {
    let c = CString::new(s).map_err(|e| Failure(Sn3Status::Invalid, e.to_string()))?;
    *out = c.into_raw();
    Ok(Sn3Status::Ok)
}

unsafe fn put_box<T>(out: *mut *mut T, v: T) -> Result<Sn3Status, Failure> {
    *out = Box::into_raw(Box::new(v));
    Ok(Sn3Status::Ok)
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn sn3_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sn3_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sn3_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `input` as N-Triples or Turtle into a new graph.
///
/// # Safety
/// `input` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn3_graph_parse(
    input: *const c_char,
    format: Sn3Format,
    out: *mut *mut Sn3Graph,
) -> Sn3Status {
    guard(|| {
        out_ptr(out)?;
        let s = text(input)?;
        let g = match format {
            Sn3Format::NTriples => parse_ntriples(s),
            Sn3Format::Turtle => parse_turtle(s),
        }
        .map_err(fail)?;
        put_box(out, Sn3Graph(g))
    })
}

/// Number of triples, or 0 for null.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sn3_graph_len(g: *const Sn3Graph) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// Writes the graph as sorted N-Triples.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn3_graph_to_ntriples(g: *const Sn3Graph, out: *mut *mut c_char) -> Sn3Status {
    guard(|| {
        out_ptr(out)?;
        let g = handle(g)?;
        let clean: Graph = g.0.iter().filter(|t| t.is_well_formed()).cloned().collect();
        put_string(out, serialize_ntriples(&clean)?)
    })
}

/// # Safety
/// `g` must be null or a live graph handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sn3_graph_free(g: *mut Sn3Graph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Parses a SPARQL query.
///
/// # Safety
/// `input` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn3_query_parse(input: *const c_char, out: *mut *mut Sn3Query) -> Sn3Status {
    guard(|| {
        out_ptr(out)?;
        let q = parse_query(text(input)?).map_err(fail)?;
        put_box(out, Sn3Query(q))
    })
}

/// # Safety
/// `q` must be null or a live query handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sn3_query_free(q: *mut Sn3Query) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Translates a query into an N3 rule document. `backward` selects `<=`.
///
/// # Safety
/// `q` must be a live query handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn3_query_translate(q: *const Sn3Query, backward: bool, out: *mut *mut c_char) -> Sn3Status {
    guard(|| {
        out_ptr(out)?;
        let q = handle(q)?;
        let mode = if backward { Mode::Backward } else { Mode::Forward };
        let doc = translation_document(&q.0, mode).map_err(fail)?;
        put_string(out, serialize_n3(&doc))
    })
}

/// Evaluates a query with the reference evaluator: TSV for SELECT,
/// N-Triples for CONSTRUCT.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn3_query_eval(q: *const Sn3Query, g: *const Sn3Graph, out: *mut *mut c_char) -> Sn3Status {
    guard(|| {
        out_ptr(out)?;
        let (q, g) = (handle(q)?, handle(g)?);
        let text = match eval_query(&q.0, &g.0).map_err(fail)? {
            QueryResult::Select { vars, rows } => select_to_tsv(&vars, &rows),
            QueryResult::Construct(c) => serialize_ntriples(&c)?,
        };
        put_string(out, text)
    })
}

/// Runs the translated rule and the reference evaluator on the same input.
/// Returns `Ok` when they agree and `Mismatch` otherwise; `diff` (optional)
/// receives the difference, empty on agreement.
///
/// # Safety
/// Handles must be live; `diff` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sn3_check(q: *const Sn3Query, g: *const Sn3Graph, diff: *mut *mut c_char) -> Sn3Status {
    guard(|| {
        let (q, g) = (handle(q)?, handle(g)?);
        let (status, text) = match check_pair(&q.0, &g.0)? {
            Verdict::Agree => (Sn3Status::Ok, String::new()),
            Verdict::Mismatch(d) => (Sn3Status::Mismatch, d),
        };
        if !diff.is_null() {
            put_string(diff, text)?;
        }
        Ok(status)
    })
}

/// Parses an N3 rule document.
///
/// # Safety
/// `input` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sn3_rules_parse(input: *const c_char, out: *mut *mut Sn3Rules) -> Sn3Status {
    guard(|| {
        out_ptr(out)?;
        let doc = parse_n3(text(input)?).map_err(fail)?;
        put_box(out, Sn3Rules(doc))
    })
}

/// Number of rules, or 0 for null.
///
/// # Safety
/// `r` must be null or a live rules handle.
#[no_mangle]
pub unsafe extern "C" fn sn3_rules_len(r: *const Sn3Rules) -> usize {
    r.as_ref().map_or(0, |r| r.0.rules.len())
}

/// # Safety
/// `r` must be null or a live rules handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sn3_rules_free(r: *mut Sn3Rules) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Forward-saturates `g` under `r`. `out` receives the closure (input plus
/// derived plain triples); `iterations` (optional) the rounds run.
///
/// # Safety
/// Handles must be live; `out` must be writable; `iterations` may be null.
#[no_mangle]
pub unsafe extern "C" fn sn3_reason(
    g: *const Sn3Graph,
    r: *const Sn3Rules,
    max_iterations: usize,
    out: *mut *mut Sn3Graph,
    iterations: *mut usize,
) -> Sn3Status {
    guard(|| {
        out_ptr(out)?;
        let (g, r) = (handle(g)?, handle(r)?);
        let cfg = EngineConfig { max_iterations, trace: false };
        let fb = saturate(&g.0, &r.0.rules, &cfg).map_err(fail)?;
        if !iterations.is_null() {
            *iterations = fb.iterations;
        }
        put_box(out, Sn3Graph(fb.facts))
    })
}

/// Answers `goal` (N3 triple patterns, prefixes of `r` in scope) by
/// backward chaining. `out` receives TSV rows; `expansions` (optional) the
/// search effort.
///
/// # Safety
/// Handles must be live; `goal` must be a NUL-terminated string; `out` must
/// be writable; `expansions` may be null.
#[no_mangle]
pub unsafe extern "C" fn sn3_solve(
    g: *const Sn3Graph,
    r: *const Sn3Rules,
    goal: *const c_char,
    out: *mut *mut c_char,
    expansions: *mut usize,
) -> Sn3Status {
    guard(|| {
        out_ptr(out)?;
        let (g, r) = (handle(g)?, handle(r)?);
        let goal = sparqln3::cli::parse_goal(text(goal)?, &r.0)?;
        let proof = prove(&g.0, &r.0.rules, &goal, &ProofConfig::default()).map_err(fail)?;
        if !expansions.is_null() {
            *expansions = proof.expansions;
        }
        let vars: Vec<Variable> = goal.vars().into_iter().collect();
        put_string(out, select_to_tsv(&vars, &proof.answers))
    })
}
