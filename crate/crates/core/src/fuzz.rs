//! Differential testing: the reference evaluator against the translated rule
//! run by the forward engine, on given inputs or on random ones.
//!
//! Generator: graphs of at most 50 triples over 8 IRIs and the integers
//! 0–9, with predicates drawn from the first three IRIs; patterns of depth
//! at most 3 over variables `?a`–`?e`. At each inner node MINUS/FE/FNE is
//! chosen with probability 0.3, OPT/UNION with 0.3 and AND/FILTER otherwise.
//! A quarter of the queries are CONSTRUCT with templates over the five
//! remaining IRIs, so templates never feed the pattern. Every query is
//! printed and re-parsed before use.
//!
//! Patterns are kept only when they pass [`is_safe`]; see its docs.

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{eval_query, QueryResult, SolutionMapping, SolutionSet};
use crate::engine::{answer_select, saturate, EngineConfig};
use crate::error::Error;
use crate::rdf::value::{ArithOp, CompareOp};
use crate::rdf::{serialize_ntriples, Graph, Term, Triple, Variable};
use crate::scope::{cv, sv, vars};
use crate::sparql::{parse_query, FilterAtom, FilterExpr, GraphPattern, Projection, Query, QueryForm};
use crate::translate::translate_query;

pub const FUZZ_NS: &str = "http://example.org/fuzz#";
pub const MAX_DEPTH: usize = 3;
pub const MAX_TRIPLES: usize = 50;
const VARS: [&str; 5] = ["a", "b", "c", "d", "e"];
const PREDICATES: usize = 3;

fn iri(i: usize) -> Term {
    Term::iri(format!("{FUZZ_NS}e{i}"))
}

/// The outcome of comparing both paths on one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Agree,
    Mismatch(String),
}

/// Runs both paths and diffs their answers. SELECT answers compare as sets
/// of rows, treating unbound and the unbound marker alike. CONSTRUCT
/// answers compare on the template predicates; for recursive templates the
/// oracle side is the CONSTRUCT fixpoint.
pub fn check_pair(q: &Query, g: &Graph) -> Result<Verdict, Error> {
    let rule = translate_query(q)?;
    let fb = saturate(g, std::slice::from_ref(&rule), &EngineConfig::default())?;
    let oracle = eval_query(q, g)?;
    match (&q.form, oracle) {
        (QueryForm::Select(_), QueryResult::Select { vars, rows }) => {
            let engine = answer_select(&fb, &rule.conclusion)?;
            let norm =
                |s: &SolutionSet| -> BTreeSet<SolutionMapping> { s.iter().map(|r| r.without_markers()).collect() };
            let (a, b) = (norm(&rows), norm(&engine));
            if a == b {
                return Ok(Verdict::Agree);
            }
            let mut diff = String::new();
            let names: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(diff, "columns: {}", names.join(" "));
            for r in a.difference(&b) {
                let _ = writeln!(diff, "- oracle only: {r}");
            }
            for r in b.difference(&a) {
                let _ = writeln!(diff, "+ engine only: {r}");
            }
            Ok(Verdict::Mismatch(diff))
        }
        (QueryForm::Construct(template), QueryResult::Construct(out)) => {
            let preds: BTreeSet<Term> = template.iter().map(|t| t.predicate.clone()).collect();
            let has_blank = template.iter().flat_map(|t| t.terms()).any(|t| matches!(t, Term::BlankNode(_)));
            let expected = if has_blank {
                let mut all = g.clone();
                all.extend(out);
                all
            } else {
                crate::algebra::fixpoint_construct(std::slice::from_ref(q), g, EngineConfig::default().max_iterations)?
                    .0
            };
            let engine: Graph = fb.facts.iter().filter(|t| t.is_well_formed()).cloned().collect();
            let (a, b) = (expected.restrict_to_predicates(&preds), engine.restrict_to_predicates(&preds));
            let same = if has_blank {
                // Fresh blank labels differ between the paths.
                let ground = |x: &Graph| -> Graph { x.iter().filter(|t| !has_blank_term(t)).cloned().collect() };
                ground(&a) == ground(&b) && a.len() == b.len()
            } else {
                a == b
            };
            if same {
                return Ok(Verdict::Agree);
            }
            let mut diff = String::new();
            for t in a.iter().filter(|t| !b.contains(t)) {
                let _ = writeln!(diff, "- oracle only: {t}");
            }
            for t in b.iter().filter(|t| !a.contains(t)) {
                let _ = writeln!(diff, "+ engine only: {t}");
            }
            Ok(Verdict::Mismatch(diff))
        }
        _ => unreachable!("query form and result form agree"),
    }
}

fn has_blank_term(t: &Triple) -> bool {
    t.terms().iter().any(|x| matches!(x, Term::BlankNode(_)) && !x.is_unbound_marker())
}

/// Whether both paths are expected to agree on `p`.
///
/// The rule premise joins siblings in one conjunction and substitutes
/// solutions into union sides and (not)includes bodies, whereas the algebra
/// evaluates each operand on its own. The two coincide unless a FILTER,
/// EXISTS body or MINUS operand reads a variable that a sibling may bind
/// but its own operand does not bind for certain. `outer` holds the
/// variables siblings may bind. `fixed` holds the variables an enclosing
/// EXISTS body substitutes away: inside a MINUS right operand the algebra
/// sees constants while the translated rule shares or relabels them.
pub fn is_safe(p: &GraphPattern) -> bool {
    safe(p, &BTreeSet::new(), &BTreeSet::new())
}

fn readable(needed: &BTreeSet<Variable>, certain: &BTreeSet<Variable>, outer: &BTreeSet<Variable>) -> bool {
    needed.iter().all(|v| certain.contains(v) || !outer.contains(v))
}

fn safe(p: &GraphPattern, outer: &BTreeSet<Variable>, fixed: &BTreeSet<Variable>) -> bool {
    let with = |extra: BTreeSet<Variable>| -> BTreeSet<Variable> { outer.union(&extra).cloned().collect() };
    match p {
        GraphPattern::Bgp(_) => true,
        GraphPattern::And(a, b) => safe(a, &with(sv(b)), fixed) && safe(b, &with(sv(a)), fixed),
        GraphPattern::Union(a, b) => safe(a, outer, fixed) && safe(b, outer, fixed),
        GraphPattern::Opt(a, b, r) => {
            let local: BTreeSet<Variable> = sv(a).union(&sv(b)).cloned().collect();
            safe(a, &with(sv(b)), fixed) && safe(b, &with(sv(a)), fixed) && readable(&r.vars(), &local, outer)
        }
        GraphPattern::Filter(a, r) => safe(a, outer, fixed) && readable(&r.vars(), &cv(a), outer),
        GraphPattern::Fe(a, b) | GraphPattern::Fne(a, b) => {
            let inner: BTreeSet<Variable> = fixed.union(&sv(a)).cloned().collect();
            safe(a, outer, fixed) && readable(&vars(b), &cv(a), outer) && safe(b, &BTreeSet::new(), &inner)
        }
        GraphPattern::Minus(a, b) => {
            let shared: BTreeSet<Variable> = sv(a).intersection(&sv(b)).cloned().collect();
            let both: BTreeSet<Variable> = cv(a).intersection(&cv(b)).cloned().collect();
            safe(a, outer, fixed) && shared.is_subset(&both) && vars(b).is_disjoint(fixed) && safe(b, &shared, fixed)
        }
    }
}

/// Random inputs from a seeded ChaCha stream.
pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn var(&mut self) -> Term {
        Term::var(*VARS.choose(&mut self.rng).expect("non-empty"))
    }

    fn int(&mut self) -> Term {
        Term::integer(self.rng.gen_range(0..10))
    }

    fn any_iri(&mut self) -> Term {
        iri(self.rng.gen_range(0..8))
    }

    pub fn graph(&mut self) -> Graph {
        let n = self.rng.gen_range(0..=MAX_TRIPLES);
        (0..n)
            .map(|_| {
                let s = self.any_iri();
                let p = iri(self.rng.gen_range(0..PREDICATES));
                let o = if self.rng.gen_bool(0.5) { self.any_iri() } else { self.int() };
                Triple::new(s, p, o)
            })
            .collect()
    }

    fn triple_pattern(&mut self) -> Triple {
        let s = if self.rng.gen_bool(0.8) { self.var() } else { self.any_iri() };
        let p = if self.rng.gen_bool(0.1) { self.var() } else { iri(self.rng.gen_range(0..PREDICATES)) };
        let o = match self.rng.gen_range(0..10) {
            0..=5 => self.var(),
            6..=7 => self.any_iri(),
            _ => self.int(),
        };
        Triple::new(s, p, o)
    }

    fn bgp(&mut self) -> GraphPattern {
        let n = self.rng.gen_range(1..=2);
        GraphPattern::bgp((0..n).map(|_| self.triple_pattern()))
    }

    fn atom(&mut self, depth: usize) -> FilterAtom {
        match self.rng.gen_range(0..10) {
            0..=5 => FilterAtom::Term(self.var()),
            6..=7 => FilterAtom::Term(self.int()),
            8 if depth > 0 => {
                let op = *[ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div].choose(&mut self.rng).expect("ops");
                let l = self.atom(depth - 1);
                let r = self.atom(depth - 1);
                FilterAtom::arith(op, l, r)
            }
            _ => FilterAtom::Term(self.any_iri()),
        }
    }

    pub fn filter(&mut self, depth: usize) -> FilterExpr {
        let k = if depth == 0 { self.rng.gen_range(0..4) } else { self.rng.gen_range(0..8) };
        match k {
            0 | 1 => {
                let op = *[CompareOp::Eq, CompareOp::Ne, CompareOp::Lt, CompareOp::Le, CompareOp::Gt, CompareOp::Ge]
                    .choose(&mut self.rng)
                    .expect("ops");
                let l = self.atom(1);
                let r = self.atom(1);
                FilterExpr::compare(op, l, r)
            }
            2 => {
                let Term::Variable(v) = self.var() else { unreachable!() };
                FilterExpr::Bound(v)
            }
            3 => {
                if self.rng.gen_bool(0.5) {
                    FilterExpr::True
                } else {
                    FilterExpr::False
                }
            }
            4 => FilterExpr::negate(self.filter(depth - 1)),
            5 => FilterExpr::and(self.filter(depth - 1), self.filter(depth - 1)),
            _ => FilterExpr::or(self.filter(depth - 1), self.filter(depth - 1)),
        }
    }

    pub fn pattern(&mut self, depth: usize) -> GraphPattern {
        if depth == 0 {
            return self.bgp();
        }
        let roll: f64 = self.rng.gen();
        let kind = if roll < 0.3 {
            ["MINUS", "FE", "FNE"][self.rng.gen_range(0..3)]
        } else if roll < 0.6 {
            ["OPT", "UNION"][self.rng.gen_range(0..2)]
        } else {
            ["BGP", "AND", "FILTER"][self.rng.gen_range(0..3)]
        };
        let sub = |g: &mut Self| {
            let d = g.rng.gen_range(0..depth);
            g.pattern(d)
        };
        match kind {
            "BGP" => self.bgp(),
            "AND" => GraphPattern::and(sub(self), sub(self)),
            "FILTER" => {
                let a = sub(self);
                GraphPattern::filter(a, self.filter(2))
            }
            "OPT" => {
                let a = sub(self);
                let b = sub(self);
                let r = if self.rng.gen_bool(0.5) { FilterExpr::True } else { self.filter(1) };
                GraphPattern::opt(a, b, r)
            }
            "UNION" => GraphPattern::union(sub(self), sub(self)),
            "MINUS" => GraphPattern::minus(sub(self), sub(self)),
            "FE" => GraphPattern::fe(sub(self), sub(self)),
            _ => GraphPattern::fne(sub(self), sub(self)),
        }
    }

    /// A safe pattern of depth at most [`MAX_DEPTH`].
    pub fn safe_pattern(&mut self) -> GraphPattern {
        loop {
            let depth = self.rng.gen_range(0..=MAX_DEPTH);
            let p = self.pattern(depth);
            if is_safe(&p) {
                return p;
            }
        }
    }

    pub fn query(&mut self) -> Query {
        let mut pattern = self.safe_pattern();
        let construct = self.rng.gen_bool(0.25);
        // A variable predicate would read template output back in.
        while construct && has_variable_predicate(&pattern) {
            pattern = self.safe_pattern();
        }
        let scope: Vec<Variable> = sv(&pattern).into_iter().collect();
        if construct && !scope.is_empty() {
            let n = self.rng.gen_range(1..=2);
            let mut template: Vec<Triple> = (0..n)
                .map(|_| {
                    let pick = |g: &mut Self| -> Term {
                        if g.rng.gen_bool(0.7) {
                            Term::Variable(scope.choose(&mut g.rng).expect("non-empty").clone())
                        } else {
                            g.any_iri()
                        }
                    };
                    let s = pick(self);
                    let o = pick(self);
                    Triple::new(s, iri(self.rng.gen_range(PREDICATES..8)), o)
                })
                .collect();
            template.dedup();
            Query::construct(template, pattern)
        } else if self.rng.gen_bool(0.5) || scope.is_empty() {
            Query::select(Projection::Star, pattern)
        } else {
            let mut vs: Vec<Variable> = scope.iter().filter(|_| self.rng.gen_bool(0.6)).cloned().collect();
            if vs.is_empty() {
                vs.push(scope[0].clone());
            }
            Query::select(Projection::Vars(vs), pattern)
        }
    }
}

/// A failing input, shrunk and printable.
#[derive(Clone, Debug)]
pub struct Reproducer {
    pub case: usize,
    pub query: String,
    pub data: String,
    pub diff: String,
}

impl std::fmt::Display for Reproducer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "mismatch in case {}", self.case)?;
        writeln!(f, "# query")?;
        writeln!(f, "{}", self.query.trim_end())?;
        writeln!(f, "# data")?;
        write!(f, "{}", self.data)?;
        writeln!(f, "# diff")?;
        write!(f, "{}", self.diff)
    }
}

#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub cases: usize,
    pub constructors: BTreeSet<&'static str>,
    pub max_depth: usize,
    pub max_triples: usize,
    pub selects: usize,
    pub constructs: usize,
    pub failure: Option<Reproducer>,
}

/// Drops data triples while the mismatch persists.
fn shrink(q: &Query, g: &Graph) -> (Graph, String) {
    let mut current: Vec<Triple> = g.iter().cloned().collect();
    let mut diff = match check_pair(q, g) {
        Ok(Verdict::Mismatch(d)) => d,
        Ok(Verdict::Agree) => String::new(),
        Err(e) => e.to_string(),
    };
    let mut i = 0;
    while i < current.len() {
        let mut candidate = current.clone();
        candidate.remove(i);
        let graph: Graph = candidate.iter().cloned().collect();
        match check_pair(q, &graph) {
            Ok(Verdict::Mismatch(d)) => {
                current = candidate;
                diff = d;
            }
            _ => i += 1,
        }
    }
    (current.into_iter().collect(), diff)
}

/// Generates and checks `n` cases; stops at the first disagreement or
/// error, which is shrunk into a reproducer.
fn has_variable_predicate(p: &GraphPattern) -> bool {
    match p {
        GraphPattern::Bgp(ts) => ts.iter().any(|t| matches!(t.predicate, Term::Variable(_))),
        GraphPattern::Filter(a, _) => has_variable_predicate(a),
        GraphPattern::And(a, b)
        | GraphPattern::Union(a, b)
        | GraphPattern::Minus(a, b)
        | GraphPattern::Opt(a, b, _)
        | GraphPattern::Fe(a, b)
        | GraphPattern::Fne(a, b) => has_variable_predicate(a) || has_variable_predicate(b),
    }
}

pub fn fuzz(n: usize, seed: u64) -> FuzzReport {
    let mut gen = Generator::new(seed);
    let mut report = FuzzReport::default();
    for case in 0..n {
        let generated = gen.query();
        let graph = gen.graph();
        report.cases += 1;
        report.constructors.extend(generated.pattern.constructors());
        report.max_depth = report.max_depth.max(generated.pattern.depth());
        report.max_triples = report.max_triples.max(graph.len());
        match generated.form {
            QueryForm::Select(_) => report.selects += 1,
            QueryForm::Construct(_) => report.constructs += 1,
        }
        let text = generated.to_string();
        let fail = |diff: String, data: &Graph| Reproducer {
            case,
            query: text.clone(),
            data: serialize_ntriples(data).unwrap_or_else(|e| format!("# {e}\n")),
            diff,
        };
        let q = match parse_query(&text) {
            Ok(q) if q.pattern == generated.pattern && q.form == generated.form => q,
            Ok(_) => {
                report.failure = Some(fail("re-parsed query differs from the generated one".into(), &graph));
                return report;
            }
            Err(e) => {
                report.failure = Some(fail(format!("printed query does not parse: {e}"), &graph));
                return report;
            }
        };
        match check_pair(&q, &graph) {
            Ok(Verdict::Agree) => {}
            Ok(Verdict::Mismatch(_)) => {
                let (small, diff) = shrink(&q, &graph);
                report.failure = Some(fail(diff, &small));
                return report;
            }
            Err(e) => {
                report.failure = Some(fail(format!("error: {e}"), &graph));
                return report;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> Query {
        parse_query(&format!("PREFIX : <http://example.org/#>\n{text}")).unwrap()
    }

    #[test]
    fn safety_examples() {
        // A filter reading a variable only a sibling binds.
        assert!(!is_safe(&q("SELECT * { { ?a :p ?b FILTER(?c = 1) } ?a :q ?c }").pattern));
        assert!(is_safe(&q("SELECT * { { ?a :p ?b FILTER(?b = 1) } ?a :q ?c }").pattern));
        assert!(is_safe(&q("SELECT * { ?a :p ?b MINUS { ?a :q ?c } }").pattern));
        // Shared MINUS variable that is only maybe-bound on the right.
        assert!(!is_safe(&q("SELECT * { ?a :p ?b MINUS { ?x :q ?y OPTIONAL { ?y :r ?a } } }").pattern));
    }

    #[test]
    fn generator_is_deterministic() {
        let mut a = Generator::new(7);
        let mut b = Generator::new(7);
        for _ in 0..20 {
            assert_eq!(a.query().to_string(), b.query().to_string());
            assert_eq!(a.graph(), b.graph());
        }
    }

    #[test]
    fn short_fuzz_run_agrees() {
        let r = fuzz(60, 1);
        assert!(r.failure.is_none(), "{}", r.failure.unwrap());
        assert!(r.max_depth <= MAX_DEPTH && r.max_triples <= MAX_TRIPLES);
    }
}
