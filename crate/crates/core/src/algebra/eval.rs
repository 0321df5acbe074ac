use std::collections::BTreeSet;

use super::{compatible, join, minus_m, union, EvalError, SolutionMapping, SolutionSet};
use crate::rdf::value::{arithmetic, compare};
use crate::rdf::{Graph, GraphIndex, Term, Triple, Variable};
use crate::sparql::{validate_query, FilterAtom, FilterExpr, GraphPattern, Query, QueryForm};

/// Result of evaluating a query: projected rows or a constructed graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryResult {
    Select { vars: Vec<Variable>, rows: SolutionSet },
    Construct(Graph),
}

/// All extensions of `initial` that map every triple pattern into the graph.
pub fn match_bgp(triples: &[Triple], index: &GraphIndex<'_>, initial: &SolutionMapping) -> Vec<SolutionMapping> {
    let mut remaining: Vec<&Triple> = triples.iter().collect();
    let mut partial = vec![initial.clone()];
    while !remaining.is_empty() && !partial.is_empty() {
        // Most-bound pattern first under the first partial binding.
        let probe = &partial[0];
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .map(|(i, t)| (i, t.terms().iter().filter(|x| resolve(x, probe).is_some()).count()))
            .max_by_key(|&(i, bound)| (bound, std::cmp::Reverse(i)))
            .unwrap();
        let pattern = remaining.remove(pos);
        let mut next = Vec::new();
        for mu in &partial {
            let s = resolve(&pattern.subject, mu);
            let p = resolve(&pattern.predicate, mu);
            let o = resolve(&pattern.object, mu);
            for cand in index.candidates(s.as_ref(), p.as_ref(), o.as_ref()) {
                let mut ext = mu.clone();
                if bind(&pattern.subject, &cand.subject, &mut ext)
                    && bind(&pattern.predicate, &cand.predicate, &mut ext)
                    && bind(&pattern.object, &cand.object, &mut ext)
                {
                    next.push(ext);
                }
            }
        }
        partial = next;
    }
    partial
}

fn resolve(t: &Term, mu: &SolutionMapping) -> Option<Term> {
    match t {
        Term::Variable(v) => mu.get(v).cloned(),
        other => Some(other.clone()),
    }
}

fn bind(pattern: &Term, value: &Term, mu: &mut SolutionMapping) -> bool {
    match pattern {
        Term::Variable(v) => match mu.get(v) {
            Some(existing) => existing == value,
            None => {
                mu.insert(v.clone(), value.clone());
                true
            }
        },
        other => other == value,
    }
}

/// Evaluates a pattern over a ground graph.
pub fn eval(p: &GraphPattern, g: &Graph) -> SolutionSet {
    let index = GraphIndex::new(g);
    eval_with(p, &index)
}

fn eval_with(p: &GraphPattern, index: &GraphIndex<'_>) -> SolutionSet {
    match p {
        GraphPattern::Bgp(ts) => match_bgp(ts, index, &SolutionMapping::new()).into_iter().collect(),
        GraphPattern::And(a, b) => join(&eval_with(a, index), &eval_with(b, index)),
        GraphPattern::Union(a, b) => union(&eval_with(a, index), &eval_with(b, index)),
        GraphPattern::Minus(a, b) => minus_m(&eval_with(a, index), &eval_with(b, index)),
        GraphPattern::Opt(a, b, r) => {
            let left = eval_with(a, index);
            let right = eval_with(b, index);
            let mut out = SolutionSet::new();
            for m1 in &left {
                let mut extended = false;
                for m2 in &right {
                    if compatible(m1, m2) {
                        let m = m1.merge(m2);
                        if eval_filter(r, &m) {
                            out.insert(m);
                            extended = true;
                        }
                    }
                }
                if !extended {
                    out.insert(m1.clone());
                }
            }
            out
        }
        GraphPattern::Fe(a, b) | GraphPattern::Fne(a, b) => {
            let want = matches!(p, GraphPattern::Fe(..));
            eval_with(a, index)
                .into_iter()
                .filter(|mu| !eval_with(&substitute(b, mu), index).is_empty() == want)
                .collect()
        }
        GraphPattern::Filter(a, r) => eval_with(a, index).into_iter().filter(|mu| eval_filter(r, mu)).collect(),
    }
}

/// Replaces every variable in `dom(μ)` by its value, filters included.
pub fn substitute(p: &GraphPattern, mu: &SolutionMapping) -> GraphPattern {
    let st = |ts: &[Triple]| -> Vec<Triple> {
        ts.iter()
            .map(|t| Triple::new(subst_term(&t.subject, mu), subst_term(&t.predicate, mu), subst_term(&t.object, mu)))
            .collect()
    };
    let b = |x: &GraphPattern| Box::new(substitute(x, mu));
    match p {
        GraphPattern::Bgp(ts) => GraphPattern::Bgp(st(ts)),
        GraphPattern::And(x, y) => GraphPattern::And(b(x), b(y)),
        GraphPattern::Union(x, y) => GraphPattern::Union(b(x), b(y)),
        GraphPattern::Minus(x, y) => GraphPattern::Minus(b(x), b(y)),
        GraphPattern::Opt(x, y, r) => GraphPattern::Opt(b(x), b(y), subst_filter(r, mu)),
        GraphPattern::Fe(x, y) => GraphPattern::Fe(b(x), b(y)),
        GraphPattern::Fne(x, y) => GraphPattern::Fne(b(x), b(y)),
        GraphPattern::Filter(x, r) => GraphPattern::Filter(b(x), subst_filter(r, mu)),
    }
}

fn subst_term(t: &Term, mu: &SolutionMapping) -> Term {
    match t {
        Term::Variable(v) => mu.get(v).cloned().unwrap_or_else(|| t.clone()),
        other => other.clone(),
    }
}

fn subst_atom(a: &FilterAtom, mu: &SolutionMapping) -> FilterAtom {
    match a {
        FilterAtom::Term(t) => FilterAtom::Term(subst_term(t, mu)),
        FilterAtom::Arith(op, l, r) => FilterAtom::arith(*op, subst_atom(l, mu), subst_atom(r, mu)),
    }
}

fn subst_filter(r: &FilterExpr, mu: &SolutionMapping) -> FilterExpr {
    match r {
        FilterExpr::Compare(op, l, rr) => FilterExpr::compare(*op, subst_atom(l, mu), subst_atom(rr, mu)),
        FilterExpr::And(l, rr) => FilterExpr::and(subst_filter(l, mu), subst_filter(rr, mu)),
        FilterExpr::Or(l, rr) => FilterExpr::or(subst_filter(l, mu), subst_filter(rr, mu)),
        FilterExpr::Not(e) => FilterExpr::negate(subst_filter(e, mu)),
        FilterExpr::Bound(v) => match mu.get(v) {
            Some(t) if !t.is_unbound_marker() => FilterExpr::True,
            Some(_) => FilterExpr::False,
            None => FilterExpr::Bound(v.clone()),
        },
        FilterExpr::True => FilterExpr::True,
        FilterExpr::False => FilterExpr::False,
    }
}

/// `μ ⊨ R`. Errors (type mismatches, unbound operands, division by zero)
/// propagate through the connectives as in SPARQL and reject at the top.
pub fn eval_filter(r: &FilterExpr, mu: &SolutionMapping) -> bool {
    filter_value(r, mu) == Some(true)
}

fn filter_value(r: &FilterExpr, mu: &SolutionMapping) -> Option<bool> {
    match r {
        FilterExpr::True => Some(true),
        FilterExpr::False => Some(false),
        FilterExpr::Bound(v) => Some(mu.get(v).is_some_and(|t| !t.is_unbound_marker())),
        FilterExpr::Compare(op, l, rr) => compare(*op, &atom_value(l, mu)?, &atom_value(rr, mu)?),
        FilterExpr::Not(e) => filter_value(e, mu).map(|b| !b),
        FilterExpr::And(l, rr) => match (filter_value(l, mu), filter_value(rr, mu)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        FilterExpr::Or(l, rr) => match (filter_value(l, mu), filter_value(rr, mu)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
    }
}

fn atom_value(a: &FilterAtom, mu: &SolutionMapping) -> Option<Term> {
    match a {
        FilterAtom::Term(Term::Variable(v)) => mu.get(v).filter(|t| !t.is_unbound_marker()).cloned(),
        FilterAtom::Term(t) => Some(t.clone()),
        FilterAtom::Arith(op, l, r) => arithmetic(*op, &atom_value(l, mu)?, &atom_value(r, mu)?),
    }
}

/// Evaluates a validated query.
pub fn eval_query(q: &Query, g: &Graph) -> Result<QueryResult, EvalError> {
    validate_query(q)?;
    let solutions = eval(&q.pattern, g);
    match &q.form {
        QueryForm::Select(_) => {
            let vars = q.projection().unwrap_or_default();
            let rows = solutions
                .iter()
                .map(|mu| vars.iter().map(|v| (v.clone(), mu.get(v).cloned().unwrap_or_else(Term::unbound))).collect())
                .collect();
            Ok(QueryResult::Select { vars, rows })
        }
        QueryForm::Construct(template) => Ok(QueryResult::Construct(instantiate(template, &solutions, g))),
    }
}

/// `⋃_μ Qμ` with per-solution fresh blanks; ill-formed triples are dropped.
fn instantiate(template: &[Triple], solutions: &SolutionSet, g: &Graph) -> Graph {
    let used = g.blank_labels();
    let mut counter = 0usize;
    let mut out = Graph::new();
    for mu in solutions {
        let mut fresh: Vec<(String, Term)> = Vec::new();
        for t in template {
            let mut inst = |x: &Term| match x {
                Term::Variable(v) => mu.get(v).cloned().unwrap_or_else(Term::unbound),
                Term::BlankNode(b) => {
                    if let Some((_, f)) = fresh.iter().find(|(l, _)| l == b) {
                        return f.clone();
                    }
                    let label = loop {
                        counter += 1;
                        let l = format!("c{counter}");
                        if !used.contains(&l) {
                            break l;
                        }
                    };
                    let f = Term::blank(label);
                    fresh.push((b.clone(), f.clone()));
                    f
                }
                other => other.clone(),
            };
            let triple = Triple::new(inst(&t.subject), inst(&t.predicate), inst(&t.object));
            if triple.is_well_formed() {
                out.insert(triple);
            }
        }
    }
    out
}

/// Least fixpoint of `g ↦ g ∪ ⋃ eval_query(q, g)`. Returns the graph and
/// the number of rounds, counting the final round that adds nothing.
pub fn fixpoint_construct(queries: &[Query], g: &Graph, cap: usize) -> Result<(Graph, usize), EvalError> {
    for q in queries {
        let QueryForm::Construct(template) = &q.form else {
            return Err(EvalError::NotConstruct);
        };
        if template.iter().flat_map(|t| t.terms()).any(|t| matches!(t, Term::BlankNode(_))) {
            return Err(EvalError::BlankTemplate);
        }
        validate_query(q)?;
    }
    let mut current = g.clone();
    for round in 1..=cap.max(1) {
        let mut added: BTreeSet<Triple> = BTreeSet::new();
        for q in queries {
            if let QueryResult::Construct(out) = eval_query(q, &current)? {
                added.extend(out.into_iter().filter(|t| !current.contains(t)));
            }
        }
        if added.is_empty() {
            return Ok((current, round));
        }
        current.extend(added);
    }
    Err(EvalError::CapExceeded { cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::RDF_TYPE;
    use crate::sparql::parse_query;

    fn x(l: &str) -> Term {
        Term::iri(format!("http://example.org/#{l}"))
    }

    fn g(triples: &[(&str, &str, Term)]) -> Graph {
        triples.iter().map(|(s, p, o)| Triple::new(x(s), x(p), o.clone())).collect()
    }

    fn q(body: &str) -> Query {
        parse_query(&format!("PREFIX : <http://example.org/#>\n{body}")).unwrap()
    }

    fn mu(pairs: &[(&str, Term)]) -> SolutionMapping {
        pairs.iter().map(|(v, t)| (Variable::new(*v), t.clone())).collect()
    }

    #[test]
    fn listing_one_is_empty() {
        let data = g(&[("s", "p", x("o")), ("s", "q", x("a")), ("a", "r", x("b"))]);
        let query = q("SELECT * WHERE { ?x :p ?n . MINUS { ?x :q ?m . FILTER EXISTS {?m :r ?n}}}");
        assert!(eval(&query.pattern, &data).is_empty());
    }

    #[test]
    fn listing_two_keeps_only_outer_binding() {
        let data = g(&[("x1", "p", Term::integer(1)), ("x2", "q", Term::integer(2)), ("x3", "p", Term::integer(3))]);
        let query = q("SELECT * { :x1 :p ?v . OPTIONAL { :x2 :q ?w . OPTIONAL { :x3 :p ?v }}}");
        let expected: SolutionSet = [mu(&[("v", Term::integer(1))])].into();
        assert_eq!(eval(&query.pattern, &data), expected);
        let QueryResult::Select { rows, .. } = eval_query(&query, &data).unwrap() else { panic!() };
        let row: SolutionSet = [mu(&[("v", Term::integer(1)), ("w", Term::unbound())])].into();
        assert_eq!(rows, row);
    }

    #[test]
    fn researcher_bgp_and_construct() {
        let data: Graph = [Triple::new(x("John"), Term::iri(RDF_TYPE), x("Researcher"))].into_iter().collect();
        let query = q("CONSTRUCT {?x a :Person . } WHERE {?x a :Researcher . }");
        let expected: SolutionSet = [mu(&[("x", x("John"))])].into();
        assert_eq!(eval(&query.pattern, &data), expected);
        let QueryResult::Construct(out) = eval_query(&query, &data).unwrap() else { panic!() };
        let want: Graph = [Triple::new(x("John"), Term::iri(RDF_TYPE), x("Person"))].into_iter().collect();
        assert_eq!(out, want);
    }

    #[test]
    fn filter_semantics() {
        let r = |s: &str| {
            let query = q(&format!("SELECT * {{ ?m :p ?n FILTER({s}) }}"));
            let crate::sparql::GraphPattern::Filter(_, r) = query.pattern else { panic!() };
            r
        };
        let ints = mu(&[("m", Term::integer(1)), ("n", Term::integer(2))]);
        assert!(eval_filter(&r("?m < ?n"), &ints));
        assert!(eval_filter(&FilterExpr::True, &SolutionMapping::new()));
        let mixed = mu(&[("m", Term::string("a")), ("n", Term::integer(2))]);
        assert!(!eval_filter(&r("?m < ?n"), &mixed));
        assert!(!eval_filter(&r("!(?m < ?n)"), &mixed));
        assert!(eval_filter(&r("?m < ?n || ?n = 2"), &mixed));
        assert!(!eval_filter(&r("?m / 0 = 1"), &ints));
        assert!(!eval_filter(&r("BOUND(?z)"), &ints));
        assert!(eval_filter(&r("!BOUND(?z)"), &ints));
        assert!(!eval_filter(&r("BOUND(?n)"), &mu(&[("n", Term::unbound())])));
    }

    #[test]
    fn construct_blanks_are_fresh_per_solution() {
        let data: Graph =
            [Triple::new(x("a1"), Term::iri(RDF_TYPE), x("C")), Triple::new(x("a2"), Term::iri(RDF_TYPE), x("C"))]
                .into_iter()
                .collect();
        let query = q("CONSTRUCT {?x :k _:b} WHERE {?x a :C}");
        let QueryResult::Construct(out) = eval_query(&query, &data).unwrap() else { panic!() };
        assert_eq!(out.len(), 2);
        assert_eq!(out.blank_labels().len(), 2);
    }

    #[test]
    fn fixpoint_on_small_chain() {
        let data = g(&[("a", "link", x("b")), ("b", "link", x("c"))]);
        let trans = q("CONSTRUCT { ?x :link ?z } WHERE { ?x :link ?y . ?y :link ?z }");
        let (out, rounds) = fixpoint_construct(&[trans], &data, 10).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(rounds, 2);
        let (same, _) = fixpoint_construct(&[], &data, 10).unwrap();
        assert_eq!(same, data);
    }

    #[test]
    fn fixpoint_cap() {
        let data = g(&[("a", "link", x("b")), ("b", "link", x("c")), ("c", "link", x("d")), ("d", "link", x("e"))]);
        let trans = q("CONSTRUCT { ?x :link ?z } WHERE { ?x :link ?y . ?y :link ?z }");
        assert!(matches!(fixpoint_construct(&[trans], &data, 1), Err(EvalError::CapExceeded { cap: 1 })));
    }

    #[test]
    fn exists_uses_substitution() {
        // Once ?b is replaced by its value the two MINUS operands share no
        // variable, so nothing is removed.
        let data = g(&[("a", "p", x("b")), ("b", "q", x("c"))]);
        let query = q("SELECT * { ?a :p ?b FILTER EXISTS { { ?b :q ?c } MINUS { ?b :q ?d } } }");
        assert_eq!(eval(&query.pattern, &data).len(), 1);
    }
}
