//! Serializer/parser round trips over generated documents.

mod common;

use proptest::prelude::*;

use common::{graph, n3_doc, same_doc};
use sparqln3::n3::{parse_n3, serialize_n3, Mode};
use sparqln3::rdf::{parse_ntriples, parse_turtle, serialize_ntriples};
use sparqln3::sparql::parse_query;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ntriples_round_trip(g in graph()) {
        let text = serialize_ntriples(&g).unwrap();
        let back = parse_ntriples(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_ntriples(&back).unwrap(), text.clone());
        // N-Triples is a Turtle subset.
        prop_assert_eq!(parse_turtle(&text).unwrap(), g);
    }

    #[test]
    fn n3_round_trip(doc in n3_doc()) {
        let text = serialize_n3(&doc);
        let back = parse_n3(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(same_doc(&doc, &back), "{}", text);
        prop_assert_eq!(serialize_n3(&back), text);
    }
}

#[test]
fn rule_modes_keep_their_arrow() {
    let text = "@prefix : <urn:t:>.\n{?x :p ?y.} => {?y :q ?x.}.\n{?x :r ?y.} <= {?x :p ?y.}.\n";
    let doc = parse_n3(text).unwrap();
    assert_eq!(doc.rules[0].mode, Mode::Forward);
    assert_eq!(doc.rules[1].mode, Mode::Backward);
    let out = serialize_n3(&doc);
    assert!(out.contains("{?x :p ?y.} => {?y :q ?x.}."), "{out}");
    assert!(out.contains("{?x :r ?y.} <= {?x :p ?y.}."), "{out}");
}

#[test]
fn printed_queries_reparse() {
    let texts = [
        "PREFIX : <urn:t:>\nSELECT * WHERE { ?x :p ?n . MINUS { ?x :q ?m . FILTER EXISTS { ?m :r ?n } } }",
        "PREFIX : <urn:t:>\nSELECT * { :x1 :p ?v . OPTIONAL { :x2 :q ?w . OPTIONAL { :x3 :p ?v } } }",
        "PREFIX : <urn:t:>\nSELECT ?a WHERE { { ?a :p 1 } UNION { ?a :q \"x\\\"y\" } FILTER(?a != :b && !(1 + 2 > 3)) }",
        "PREFIX : <urn:t:>\nCONSTRUCT { ?a :s _:n } WHERE { ?a :p ?b FILTER NOT EXISTS { ?b :q ?a } }",
    ];
    for t in texts {
        let q = parse_query(t).unwrap();
        let again = parse_query(&q.to_string()).unwrap();
        assert_eq!(again.pattern, q.pattern, "{t}");
        assert_eq!(again.form, q.form, "{t}");
    }
}
