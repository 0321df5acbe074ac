//! Query to rule translation: the premise mapping, filter translation and
//! head mapping, plus the runtime ruleset shipped alongside translations.

mod runtime;

use thiserror::Error;

pub use runtime::{runtime_rules, runtime_text, union_rules, RUNTIME_N3};

use crate::error::ValidationError;
use crate::n3::vocab::{
    arithmetic_iri, comparison_iri, LOG_EQUAL_TO, LOG_INCLUDES, LOG_NOT_EQUAL_TO, LOG_NOT_INCLUDES,
};
use crate::n3::vocab::{SIN3_OPTIONAL, SIN3_RESULT, SIN3_UNBOUND, SIN3_UNION};
use crate::n3::{Mode, N3Doc, N3Gp, N3Rule, N3Term, N3Triple};
use crate::rdf::{Literal, Term, XSD_BOOLEAN};
use crate::scope::{rl, sv};
use crate::sparql::{validate_query, FilterAtom, FilterExpr, GraphPattern, Projection, Query, QueryForm};

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("variable ?{0} is reserved for generated names")]
    ReservedVariable(String),
}

/// Translation state: the counter behind `?tmp_k` arithmetic temporaries.
#[derive(Default)]
pub struct Translator {
    tmp: usize,
}

impl Translator {
    pub fn new() -> Self {
        Self::default()
    }

    /// The premise mapping `m`.
    pub fn pattern(&mut self, p: &GraphPattern) -> N3Gp {
        match p {
            GraphPattern::Bgp(ts) => ts.iter().cloned().map(N3Triple::from).collect(),
            GraphPattern::And(a, b) => self.pattern(a).union(self.pattern(b)),
            GraphPattern::Opt(a, b, r) => {
                let m = self.pattern(a);
                let o = self.pattern(b).union(self.filter(r));
                single(N3Triple::new(N3Term::Graph(m), N3Term::iri(SIN3_OPTIONAL), N3Term::Graph(o)))
            }
            GraphPattern::Union(a, b) => {
                let l = self.pattern(a);
                let r = self.pattern(b);
                single(N3Triple::new(N3Term::Graph(l), N3Term::iri(SIN3_UNION), N3Term::Graph(r)))
            }
            GraphPattern::Minus(a, b) => {
                let shared: std::collections::BTreeSet<_> = sv(a).intersection(&sv(b)).cloned().collect();
                let m1 = self.pattern(a);
                if shared.is_empty() {
                    return m1;
                }
                let m2 = rl(&self.pattern(b), &shared);
                m1.union(single(N3Triple::new(N3Term::closure(), N3Term::iri(LOG_NOT_INCLUDES), N3Term::Graph(m2))))
            }
            GraphPattern::Fe(a, b) | GraphPattern::Fne(a, b) => {
                let builtin = if matches!(p, GraphPattern::Fe(..)) { LOG_INCLUDES } else { LOG_NOT_INCLUDES };
                let m1 = self.pattern(a);
                let m2 = self.pattern(b);
                m1.union(single(N3Triple::new(N3Term::closure(), N3Term::iri(builtin), N3Term::Graph(m2))))
            }
            GraphPattern::Filter(a, r) => self.pattern(a).union(self.filter(r)),
        }
    }

    /// The filter translation `ft`.
    pub fn filter(&mut self, r: &FilterExpr) -> N3Gp {
        match r {
            FilterExpr::True => N3Gp::new(),
            FilterExpr::False => single(N3Triple::new(bool_lit(false), N3Term::iri(LOG_EQUAL_TO), bool_lit(true))),
            FilterExpr::Compare(op, l, rr) => {
                let mut out = N3Gp::new();
                let lt = self.atom(l, &mut out);
                let rt = self.atom(rr, &mut out);
                out.insert(N3Triple::new(lt, N3Term::iri(comparison_iri(*op)), rt));
                out
            }
            FilterExpr::And(l, rr) => self.filter(l).union(self.filter(rr)),
            FilterExpr::Or(l, rr) => {
                let a = self.filter(l);
                let b = self.filter(rr);
                single(N3Triple::new(N3Term::Graph(a), N3Term::iri(SIN3_UNION), N3Term::Graph(b)))
            }
            FilterExpr::Bound(v) => single(N3Triple::new(
                Term::Variable(v.clone()),
                N3Term::iri(LOG_NOT_EQUAL_TO),
                N3Term::iri(SIN3_UNBOUND),
            )),
            FilterExpr::Not(e) => self.negated(e),
        }
    }

    /// `ft(¬e)`, pushing the negation inwards.
    fn negated(&mut self, e: &FilterExpr) -> N3Gp {
        match e {
            FilterExpr::True => self.filter(&FilterExpr::False),
            FilterExpr::False => N3Gp::new(),
            FilterExpr::Compare(op, l, r) => self.filter(&FilterExpr::compare(op.negate(), l.clone(), r.clone())),
            FilterExpr::And(l, r) => {
                self.filter(&FilterExpr::or(FilterExpr::negate((**l).clone()), FilterExpr::negate((**r).clone())))
            }
            FilterExpr::Or(l, r) => {
                self.filter(&FilterExpr::and(FilterExpr::negate((**l).clone()), FilterExpr::negate((**r).clone())))
            }
            FilterExpr::Not(inner) => self.filter(inner),
            FilterExpr::Bound(v) => {
                single(N3Triple::new(Term::Variable(v.clone()), N3Term::iri(LOG_EQUAL_TO), N3Term::iri(SIN3_UNBOUND)))
            }
        }
    }

    fn atom(&mut self, a: &FilterAtom, aux: &mut N3Gp) -> N3Term {
        match a {
            FilterAtom::Term(t) => N3Term::Atomic(t.clone()),
            FilterAtom::Arith(op, l, r) => {
                let lt = self.atom(l, aux);
                let rt = self.atom(r, aux);
                self.tmp += 1;
                let tmp = N3Term::var(format!("tmp_{}", self.tmp));
                aux.insert(N3Triple::new(N3Term::List(vec![lt, rt]), N3Term::iri(arithmetic_iri(*op)), tmp.clone()));
                tmp
            }
        }
    }
}

fn single(t: N3Triple) -> N3Gp {
    [t].into_iter().collect()
}

fn bool_lit(b: bool) -> N3Term {
    N3Term::Atomic(Term::Literal(Literal::typed(b.to_string(), XSD_BOOLEAN)))
}

/// `m(P)` with a fresh temporary counter.
pub fn translate_pattern(p: &GraphPattern) -> N3Gp {
    Translator::new().pattern(p)
}

/// `ft(R)` with a fresh temporary counter.
pub fn translate_filter(r: &FilterExpr) -> N3Gp {
    Translator::new().filter(r)
}

/// The head mapping `h`. SELECT heads carry `("name" ?name)` pairs so that
/// answers can be decoded under the original variable names.
pub fn translate_head(form: &QueryForm, p: &GraphPattern) -> N3Gp {
    match form {
        QueryForm::Construct(template) => template.iter().cloned().map(N3Triple::from).collect(),
        QueryForm::Select(projection) => {
            let scope = sv(p);
            let vars: Vec<_> = match projection {
                Projection::Star => crate::scope::sv_ordered(p),
                Projection::Vars(vs) => vs.clone(),
            };
            // A projected variable outside the scope is never bound.
            let pairs = vars
                .into_iter()
                .map(|v| {
                    let value = if scope.contains(&v) {
                        N3Term::Atomic(Term::Variable(v.clone()))
                    } else {
                        N3Term::iri(SIN3_UNBOUND)
                    };
                    N3Term::List(vec![N3Term::Atomic(Term::string(v.name())), value])
                })
                .collect();
            single(N3Triple::new(Term::blank("result"), N3Term::iri(SIN3_RESULT), N3Term::List(pairs)))
        }
    }
}

/// One rule per query: `m(P) => h(form, P)`.
pub fn translate_query(q: &Query) -> Result<N3Rule, TranslateError> {
    validate_query(q)?;
    if let Some(v) = crate::scope::vars(&q.pattern).into_iter().find(|v| crate::sparql::is_reserved_variable(v.name()))
    {
        return Err(TranslateError::ReservedVariable(v.name().to_owned()));
    }
    let mut t = Translator::new();
    let premise = t.pattern(&q.pattern);
    let conclusion = translate_head(&q.form, &q.pattern);
    Ok(N3Rule::forward(premise, conclusion))
}

/// A rule file for one query, using the query's prefixes.
pub fn translation_document(q: &Query, mode: Mode) -> Result<N3Doc, TranslateError> {
    let mut rule = translate_query(q)?;
    rule.mode = mode;
    let mut doc = N3Doc::new();
    for (p, ns) in &q.prefixes {
        doc.add_prefix(p, ns);
    }
    doc.rules.push(rule);
    Ok(doc)
}

/// True when a SELECT head produced by `translate_head`.
pub fn is_result_head(head: &N3Gp) -> bool {
    head.len() == 1 && head.iter().next().and_then(N3Triple::predicate_iri) == Some(SIN3_RESULT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::n3::serialize_n3;
    use crate::rdf::value::{ArithOp, CompareOp};
    use crate::rdf::Variable;
    use crate::sparql::parse_query;

    const EX: &str = "http://example.org/#";

    fn q(body: &str) -> Query {
        parse_query(&format!("PREFIX : <{EX}>\n{body}")).unwrap()
    }

    fn ex(l: &str) -> N3Term {
        N3Term::iri(format!("{EX}{l}"))
    }

    fn tr(s: N3Term, p: N3Term, o: N3Term) -> N3Triple {
        N3Triple::new(s, p, o)
    }

    #[test]
    fn query_two_becomes_rule_four() {
        let doc =
            translation_document(&q("CONSTRUCT {?x a :Person . } WHERE {?x a :Researcher . }"), Mode::Forward).unwrap();
        let text = serialize_n3(&doc);
        assert!(text.ends_with("{?x a :Researcher.} => {?x a :Person.}.\n"), "{text}");
    }

    #[test]
    fn listing_one_premise() {
        let p = q("SELECT * WHERE { ?x :p ?n . MINUS { ?x :q ?m . FILTER EXISTS {?m :r ?n}}}").pattern;
        let inner: N3Gp = [tr(N3Term::var("m_rl1"), ex("r"), N3Term::var("n_rl2"))].into_iter().collect();
        let body: N3Gp = [
            tr(N3Term::var("x"), ex("q"), N3Term::var("m_rl1")),
            tr(N3Term::closure(), N3Term::iri(LOG_INCLUDES), N3Term::Graph(inner)),
        ]
        .into_iter()
        .collect();
        let expected: N3Gp = [
            tr(N3Term::var("x"), ex("p"), N3Term::var("n")),
            tr(N3Term::closure(), N3Term::iri(LOG_NOT_INCLUDES), N3Term::Graph(body)),
        ]
        .into_iter()
        .collect();
        assert_eq!(translate_pattern(&p), expected);
    }

    #[test]
    fn disjoint_minus_drops_right_side() {
        let p = q("SELECT * { ?a :p :o MINUS { ?b :q :o } }").pattern;
        let expected: N3Gp = [tr(N3Term::var("a"), ex("p"), ex("o"))].into_iter().collect();
        assert_eq!(translate_pattern(&p), expected);
    }

    #[test]
    fn comparison_and_arithmetic_filters() {
        let lt = FilterExpr::compare(CompareOp::Lt, FilterAtom::var("m"), FilterAtom::var("n"));
        let expected: N3Gp = [tr(N3Term::var("m"), N3Term::iri(crate::n3::vocab::MATH_LESS_THAN), N3Term::var("n"))]
            .into_iter()
            .collect();
        assert_eq!(translate_filter(&lt), expected);
        assert!(translate_filter(&FilterExpr::True).is_empty());
        let sum = FilterExpr::compare(
            CompareOp::Lt,
            FilterAtom::arith(ArithOp::Add, FilterAtom::var("a"), FilterAtom::Term(Term::integer(1))),
            FilterAtom::var("b"),
        );
        let expected: N3Gp = [
            tr(
                N3Term::List(vec![N3Term::var("a"), N3Term::Atomic(Term::integer(1))]),
                N3Term::iri(crate::n3::vocab::MATH_SUM),
                N3Term::var("tmp_1"),
            ),
            tr(N3Term::var("tmp_1"), N3Term::iri(crate::n3::vocab::MATH_LESS_THAN), N3Term::var("b")),
        ]
        .into_iter()
        .collect();
        assert_eq!(translate_filter(&sum), expected);
    }

    #[test]
    fn negation_inverts_operators() {
        let not_lt = FilterExpr::negate(FilterExpr::compare(CompareOp::Lt, FilterAtom::var("a"), FilterAtom::var("b")));
        let out = translate_filter(&not_lt);
        assert_eq!(out.iter().next().unwrap().predicate_iri(), Some(crate::n3::vocab::MATH_NOT_LESS_THAN));
        let not_bound = FilterExpr::negate(FilterExpr::Bound(Variable::new("a")));
        assert_eq!(translate_filter(&not_bound).iter().next().unwrap().predicate_iri(), Some(LOG_EQUAL_TO));
    }

    #[test]
    fn select_heads() {
        let p = q("SELECT * WHERE { ?x :p ?n . MINUS { ?x :q ?m . FILTER EXISTS {?m :r ?n}}}").pattern;
        let head = translate_head(&QueryForm::Select(Projection::Star), &p);
        let t = head.iter().next().unwrap();
        let N3Term::List(pairs) = &t.object else { panic!() };
        let names: Vec<&N3Term> = pairs
            .iter()
            .map(|p| match p {
                N3Term::List(v) => &v[1],
                _ => panic!(),
            })
            .collect();
        assert_eq!(names, [&N3Term::var("x"), &N3Term::var("n")]);
        let explicit = translate_head(&QueryForm::Select(Projection::Vars(vec![Variable::new("a")])), &p);
        // ?a is outside the scope, so its value is the unbound marker.
        assert!(explicit.vars().is_empty());
        let t = explicit.iter().next().unwrap();
        let N3Term::List(pairs) = &t.object else { panic!() };
        assert_eq!(pairs[0], N3Term::List(vec![N3Term::Atomic(Term::string("a")), N3Term::iri(SIN3_UNBOUND)]));
        assert!(is_result_head(&explicit));
    }

    #[test]
    fn translation_is_byte_stable() {
        let query = q("SELECT * { ?a :p ?b OPTIONAL { ?b :q ?c FILTER(?c + 1 > 2) } FILTER NOT EXISTS { ?a :r ?b } }");
        let one = serialize_n3(&translation_document(&query, Mode::Forward).unwrap());
        let two = serialize_n3(&translation_document(&query, Mode::Forward).unwrap());
        assert_eq!(one, two);
    }
}
