//! Strategies shared by the round-trip and acceptance tests.
#![allow(dead_code)]

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;

use sparqln3::n3::{N3Doc, N3Gp, N3Rule, N3Term, N3Triple};
use sparqln3::rdf::{Graph, Literal, Term, Triple, XSD_DECIMAL};

pub const NS: &str = "http://example.org/rt#";

fn iri() -> impl Strategy<Value = Term> {
    prop_oneof![
        "[a-z][a-zA-Z0-9_]{0,6}".prop_map(|l| Term::iri(format!("{NS}{l}"))),
        "[a-z]{1,5}".prop_map(|l| Term::iri(format!("urn:x:{l}"))),
        // Locals a prefixed name cannot carry.
        "[a-z]{1,3}[./][a-z]{1,3}".prop_map(|l| Term::iri(format!("{NS}{l}"))),
    ]
}

fn blank() -> impl Strategy<Value = Term> {
    "b[0-9]{1,2}".prop_map(Term::blank)
}

fn lexical() -> impl Strategy<Value = String> {
    // Quotes, backslashes, control characters and non-ASCII text.
    vec(prop_oneof![Just('"'), Just('\\'), Just('\n'), Just('\t'), Just('é'), Just('∀'), any::<char>()], 0..8)
        .prop_map(|cs| cs.into_iter().filter(|c| *c != '\0').collect())
}

fn literal() -> impl Strategy<Value = Term> {
    prop_oneof![
        lexical().prop_map(Term::string),
        (lexical(), "[a-z]{2}(-[a-z]{2})?").prop_map(|(l, lang)| Term::Literal(Literal::lang_string(l, lang))),
        any::<i32>().prop_map(|i| Term::integer(i as i64)),
        (0u32..1000, 1u32..100).prop_map(|(a, b)| Term::Literal(Literal::typed(format!("{a}.{b}"), XSD_DECIMAL))),
        (lexical(), iri()).prop_map(|(l, dt)| match dt {
            Term::Iri(d) => Term::Literal(Literal::typed(l, d)),
            _ => unreachable!(),
        }),
    ]
}

fn triple() -> impl Strategy<Value = Triple> {
    (prop_oneof![iri(), blank()], iri(), prop_oneof![iri(), blank(), literal()])
        .prop_map(|(s, p, o)| Triple::new(s, p, o))
}

pub fn graph() -> impl Strategy<Value = Graph> {
    btree_set(triple(), 0..12).prop_map(|ts| ts.into_iter().collect())
}

fn var() -> impl Strategy<Value = Term> {
    "[a-e][0-9]?".prop_map(Term::var)
}

fn n3_atom() -> impl Strategy<Value = N3Term> {
    prop_oneof![4 => iri(), 2 => var(), 1 => literal()].prop_map(N3Term::Atomic)
}

fn n3_term() -> impl Strategy<Value = N3Term> {
    n3_atom().prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            vec(inner.clone(), 0..4).prop_map(N3Term::List),
            vec((inner.clone(), iri(), inner), 1..3).prop_map(|ts| {
                N3Term::Graph(ts.into_iter().map(|(s, p, o)| N3Triple::new(s, N3Term::Atomic(p), o)).collect())
            }),
        ]
    })
}

fn n3_gp() -> impl Strategy<Value = N3Gp> {
    vec((n3_term(), prop_oneof![4 => iri(), 1 => var()], n3_term()), 1..4)
        .prop_map(|ts| ts.into_iter().map(|(s, p, o)| N3Triple::new(s, N3Term::Atomic(p), o)).collect())
}

pub fn n3_doc() -> impl Strategy<Value = N3Doc> {
    let fact = (prop_oneof![iri(), blank()], iri(), prop_oneof![iri(), blank(), literal()])
        .prop_map(|(s, p, o)| N3Triple::new(N3Term::Atomic(s), N3Term::Atomic(p), N3Term::Atomic(o)));
    let rule =
        (n3_gp(), n3_gp(), any::<bool>()).prop_map(
            |(p, c, fwd)| {
                if fwd {
                    N3Rule::forward(p, c)
                } else {
                    N3Rule::backward(p, c)
                }
            },
        );
    (vec(fact, 0..5), vec(rule, 0..4)).prop_map(|(facts, rules)| {
        let mut doc = N3Doc::new().with_prefix("rt", NS);
        doc.facts = facts.into_iter().collect();
        doc.rules = rules;
        doc
    })
}

pub fn same_doc(a: &N3Doc, b: &N3Doc) -> bool {
    a.facts.set_eq(&b.facts)
        && a.rules.len() == b.rules.len()
        && a.rules
            .iter()
            .zip(&b.rules)
            .all(|(x, y)| x.mode == y.mode && x.premise.set_eq(&y.premise) && x.conclusion.set_eq(&y.conclusion))
}
