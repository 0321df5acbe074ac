//! Synthetic inputs: the Deep Taxonomy class hierarchy and a linear chain.

use crate::rdf::{Graph, Term, Triple, RDFS_SUBCLASS_OF, RDF_TYPE};

pub const DT_NS: &str = "http://example.org/dt#";
pub const CHAIN_NS: &str = "http://example.org/chain#";

/// The subclass rule as a CONSTRUCT query.
pub const CAX_SCO_QUERY: &str = "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n\
CONSTRUCT { ?x a ?d } WHERE { ?x a ?c . ?c rdfs:subClassOf ?d }\n";

/// Members of the top class.
pub const DT_GOAL_QUERY: &str = "PREFIX dt: <http://example.org/dt#>\nSELECT ?x WHERE { ?x a dt:A2 }\n";

/// Goal pattern for `solve`, matching [`DT_GOAL_QUERY`].
pub const DT_GOAL: &str = "?x a <http://example.org/dt#A2>";

pub const TRANSITIVITY_QUERY: &str = "PREFIX c: <http://example.org/chain#>\n\
CONSTRUCT { ?x c:link ?z } WHERE { ?x c:link ?y . ?y c:link ?z }\n";

fn dt(local: &str) -> Term {
    Term::iri(format!("{DT_NS}{local}"))
}

/// One instance `dt:i` of `dt:N0`, the chain `N0 ⊑ N1 ⊑ … ⊑ N{depth} ⊑ A2`,
/// and `width` extra superclasses `S{k}_{j}` of each `N{k-1}`.
pub fn deep_taxonomy(depth: usize, width: usize) -> Graph {
    let sub = Term::iri(RDFS_SUBCLASS_OF);
    let mut g = Graph::new();
    g.insert(Triple::new(dt("i"), Term::iri(RDF_TYPE), dt("N0")));
    for k in 1..=depth {
        let lower = dt(&format!("N{}", k - 1));
        g.insert(Triple::new(lower.clone(), sub.clone(), dt(&format!("N{k}"))));
        for j in 1..=width {
            g.insert(Triple::new(lower.clone(), sub.clone(), dt(&format!("S{k}_{j}"))));
        }
    }
    g.insert(Triple::new(dt(&format!("N{depth}")), sub, dt("A2")));
    g
}

/// `length` edges `a{i} c:link a{i+1}`.
pub fn chain(length: usize) -> Graph {
    let node = |i: usize| Term::iri(format!("{CHAIN_NS}a{i}"));
    let link = Term::iri(format!("{CHAIN_NS}link"));
    (0..length).map(|i| Triple::new(node(i), link.clone(), node(i + 1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dt_sizes() {
        let g = deep_taxonomy(1, 0);
        let class = g.iter().filter(|t| t.predicate == Term::iri(RDFS_SUBCLASS_OF)).count();
        assert_eq!(class, 2);
        assert_eq!(g.len(), 3);
        assert_eq!(deep_taxonomy(4, 2).len(), 1 + 4 * 3 + 1);
    }

    #[test]
    fn chain_sizes() {
        assert_eq!(chain(1).len(), 1);
        assert_eq!(chain(100).len(), 100);
    }
}
