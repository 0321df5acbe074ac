//! Invariants over small dense graphs, where patterns actually match.

use proptest::collection::btree_set;
use proptest::prelude::*;

use sparqln3::algebra::{eval, eval_query, QueryResult};
use sparqln3::engine::{saturate, EngineConfig};
use sparqln3::fuzz::{check_pair, is_safe, Verdict};
use sparqln3::n3::{parse_n3, N3Gp};
use sparqln3::prover::{prove, ProofConfig};
use sparqln3::rdf::{Graph, Term, Triple};
use sparqln3::sparql::parse_query;

const NS: &str = "urn:p:";

fn node() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => (0..4u8).prop_map(|i| Term::iri(format!("{NS}n{i}"))),
        1 => (1..3i64).prop_map(Term::integer),
    ]
}

fn small_graph() -> impl Strategy<Value = Graph> {
    let subject = (0..4u8).prop_map(|i| Term::iri(format!("{NS}n{i}")));
    let predicate = prop_oneof![Just("p"), Just("q")].prop_map(|p| Term::iri(format!("{NS}{p}")));
    btree_set((subject, predicate, node()).prop_map(|(s, p, o)| Triple::new(s, p, o)), 0..14)
        .prop_map(|ts| ts.into_iter().collect())
}

const QUERIES: &[&str] = &[
    "SELECT * { ?x :p ?y . OPTIONAL { ?y :q ?z } }",
    "SELECT ?x { ?x :p ?y MINUS { ?y :q ?x } }",
    "SELECT * { { ?x :p ?y } UNION { ?x :q ?y } FILTER(?y != :n0) }",
    "SELECT ?x { ?x :p ?y FILTER NOT EXISTS { ?y :p ?x } }",
    "SELECT * { ?x :p ?y OPTIONAL { ?y :p ?z FILTER EXISTS { ?z :q ?y } } }",
    "SELECT * { ?x :q ?n FILTER(?n + 1 > 2) }",
    "CONSTRUCT { ?y :r ?x } WHERE { ?x :p ?y OPTIONAL { ?x :q ?w } FILTER(!BOUND(?w)) }",
    "CONSTRUCT { ?x :p ?z } WHERE { ?x :p ?y . ?y :p ?z }",
];

const POSITIVE: &[&str] = &[
    "SELECT * { ?x :p ?y . ?y :q ?z }",
    "SELECT * { { ?x :p ?y } UNION { ?y :q ?x } }",
    "SELECT * { ?x :p ?y FILTER(?x = ?y || ?y = :n1) }",
];

fn query(body: &str) -> sparqln3::sparql::Query {
    parse_query(&format!("PREFIX : <{NS}>\n{body}")).unwrap()
}

fn union(a: &Graph, b: &Graph) -> Graph {
    let mut g = a.clone();
    g.extend(b.iter().cloned());
    g
}

const RULES: &str = "{?x :p ?y} => {?x :reach ?y}.\n{?x :p ?y. ?y :reach ?z} => {?x :reach ?z}.\n\
                     {?x :q ?y} => {?y :q ?x}.\n";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn translated_rules_agree_with_evaluator(g in small_graph()) {
        for body in QUERIES {
            let q = query(body);
            prop_assert!(is_safe(&q.pattern), "{}", body);
            prop_assert_eq!(check_pair(&q, &g).unwrap(), Verdict::Agree, "{}", body);
        }
    }

    #[test]
    fn positive_patterns_are_monotone(g in small_graph(), h in small_graph()) {
        let big = union(&g, &h);
        for body in POSITIVE {
            let p = query(body).pattern;
            let (small, large) = (eval(&p, &g), eval(&p, &big));
            prop_assert!(small.is_subset(&large), "{}", body);
        }
    }

    #[test]
    fn saturation_is_an_extensive_idempotent_closure(g in small_graph()) {
        let doc = parse_n3(&format!("@prefix : <{NS}>.\n{RULES}")).unwrap();
        let cfg = EngineConfig::default();
        let once = saturate(&g, &doc.rules, &cfg).unwrap();
        prop_assert!(g.is_subset(&once.facts));
        let twice = saturate(&once.facts, &doc.rules, &cfg).unwrap();
        prop_assert_eq!(&twice.facts, &once.facts);
    }

    #[test]
    fn prover_matches_forward_closure(g in small_graph()) {
        let doc = parse_n3(&format!("@prefix : <{NS}>.\n{RULES}")).unwrap();
        let goal_doc = parse_n3(&format!("@prefix : <{NS}>.\n{{?a :reach ?b}} => {{}}.\n")).unwrap();
        let goal: N3Gp = goal_doc.rules[0].premise.clone();
        let proof = prove(&g, &doc.rules, &goal, &ProofConfig::default()).unwrap();

        let closure = saturate(&g, &doc.rules, &EngineConfig::default()).unwrap();
        let q = query("SELECT * { ?a :reach ?b }");
        let QueryResult::Select { rows, .. } = eval_query(&q, &closure.facts).unwrap() else { unreachable!() };
        prop_assert_eq!(proof.answers, rows);
    }
}
