//! Predicate dependency graph and stratum assignment.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::EngineError;
use crate::n3::vocab::{self, LOG, MATH};
use crate::n3::{N3Gp, N3Rule, N3Term};
use crate::rdf::Term;

/// Rule indexes grouped by stratum, lowest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratification {
    pub strata: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Pred(Term),
    /// A variable predicate: reads or writes every predicate.
    Any,
}

#[derive(Default)]
struct Deps {
    heads: BTreeSet<Node>,
    positive: BTreeSet<Node>,
    negative: BTreeSet<Node>,
    /// Head predicates only ever stored with nested terms.
    opaque: BTreeSet<Node>,
}

fn node_of(t: &N3Term) -> Option<Node> {
    match t {
        N3Term::Atomic(Term::Variable(_)) => Some(Node::Any),
        N3Term::Atomic(t @ Term::Iri(_)) => Some(Node::Pred(t.clone())),
        _ => None,
    }
}

fn collect_body(g: &N3Gp, negative: bool, deps: &mut Deps) {
    for t in g {
        let sub_graph = |term: &N3Term| match term {
            N3Term::Graph(g) => Some(g.clone()),
            _ => None,
        };
        match t.predicate_iri() {
            Some(vocab::LOG_INCLUDES) => {
                if let Some(b) = sub_graph(&t.object) {
                    collect_body(&b, negative, deps);
                }
            }
            Some(vocab::LOG_NOT_INCLUDES) => {
                if let Some(b) = sub_graph(&t.object) {
                    collect_body(&b, true, deps);
                }
            }
            Some(vocab::SIN3_UNION) => {
                for side in [&t.subject, &t.object] {
                    if let Some(b) = sub_graph(side) {
                        collect_body(&b, negative, deps);
                    }
                }
            }
            Some(vocab::SIN3_OPTIONAL) => {
                // The optional side is read under negation: its absence
                // decides which rows survive unextended.
                if let Some(m) = sub_graph(&t.subject) {
                    collect_body(&m, negative, deps);
                }
                if let Some(o) = sub_graph(&t.object) {
                    collect_body(&o, true, deps);
                }
            }
            Some(p) if p.starts_with(LOG) || p.starts_with(MATH) => {}
            _ => {
                if let Some(n) = node_of(&t.predicate) {
                    if negative {
                        deps.negative.insert(n);
                    } else {
                        deps.positive.insert(n);
                    }
                }
            }
        }
    }
}

fn rule_deps(rule: &N3Rule) -> Deps {
    let mut deps = Deps::default();
    collect_body(&rule.premise, false, &mut deps);
    for t in &rule.conclusion {
        if let Some(n) = node_of(&t.predicate) {
            // Facts with nested terms are never matched by premises.
            if t.as_plain().is_none() {
                deps.opaque.insert(n.clone());
            }
            deps.heads.insert(n);
        }
    }
    deps
}

fn expand(set: &BTreeSet<Node>, all: &BTreeSet<Term>) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for n in set {
        match n {
            Node::Pred(p) => {
                out.insert(p.clone());
            }
            Node::Any => out.extend(all.iter().cloned()),
        }
    }
    out
}

/// Assigns every rule a stratum so that each predicate read under negation
/// is complete before it is read. Fails when a negative dependency lies on
/// a cycle.
pub fn stratify(rules: &[N3Rule]) -> Result<Stratification, EngineError> {
    let deps: Vec<Deps> = rules.iter().map(rule_deps).collect();
    let mut nodes = BTreeSet::new();
    let mut all = BTreeSet::new();
    for d in &deps {
        for n in d.heads.iter().chain(&d.positive).chain(&d.negative) {
            if let Node::Pred(p) = n {
                nodes.insert(p.clone());
                if !d.opaque.contains(n) || d.positive.contains(n) || d.negative.contains(n) {
                    all.insert(p.clone());
                }
            }
        }
    }

    let mut graph: DiGraph<Term, bool> = DiGraph::new();
    let index: BTreeMap<Term, NodeIndex> = nodes.iter().map(|p| (p.clone(), graph.add_node(p.clone()))).collect();
    let mut edges = BTreeSet::new();
    for d in &deps {
        let heads = expand(&d.heads, &all);
        for (body, neg) in [(&d.positive, false), (&d.negative, true)] {
            for b in expand(body, &all) {
                for h in &heads {
                    edges.insert((index[&b], index[h], neg));
                }
            }
        }
    }
    for &(a, b, neg) in &edges {
        graph.add_edge(a, b, neg);
    }

    // Tarjan yields components sinks first.
    let mut sccs = tarjan_scc(&graph);
    sccs.reverse();
    let mut comp = vec![0usize; graph.node_count()];
    for (c, nodes) in sccs.iter().enumerate() {
        for n in nodes {
            comp[n.index()] = c;
        }
    }
    for &(a, b, neg) in &edges {
        if neg && comp[a.index()] == comp[b.index()] {
            let mut preds: Vec<String> = sccs[comp[a.index()]].iter().map(|n| graph[*n].to_string()).collect();
            preds.sort();
            return Err(EngineError::Unstratifiable { predicates: preds.join(", ") });
        }
    }

    let mut level = vec![0usize; sccs.len()];
    for c in 0..sccs.len() {
        for &(a, b, neg) in &edges {
            let (ca, cb) = (comp[a.index()], comp[b.index()]);
            if cb == c && ca != c {
                level[c] = level[c].max(level[ca] + neg as usize);
            }
        }
    }
    let stratum_of = |p: &Term| level[comp[index[p].index()]];

    let mut by_stratum: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, d) in deps.iter().enumerate() {
        let pos = expand(&d.positive, &all).iter().map(stratum_of).max().unwrap_or(0);
        let neg = expand(&d.negative, &all).iter().map(|p| stratum_of(p) + 1).max().unwrap_or(0);
        by_stratum.entry(pos.max(neg)).or_default().push(i);
    }
    Ok(Stratification { strata: by_stratum.into_values().collect() })
}
