//! Reference evaluator for the SPARQL algebra: solution mappings, the set
//! operators, pattern and query evaluation, and a naive CONSTRUCT fixpoint.

mod eval;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use eval::{eval, eval_filter, eval_query, fixpoint_construct, match_bgp, substitute, QueryResult};

use crate::error::ValidationError;
use crate::rdf::{Term, Variable};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("CONSTRUCT fixpoint did not converge within {cap} iterations")]
    CapExceeded { cap: usize },
    #[error("CONSTRUCT fixpoint needs blank-free templates")]
    BlankTemplate,
    #[error("fixpoint needs CONSTRUCT queries")]
    NotConstruct,
}

/// A partial map from variables to ground terms.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SolutionMapping {
    bindings: BTreeMap<Variable, Term>,
}

impl SolutionMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Variable) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn insert(&mut self, v: Variable, t: Term) -> Option<Term> {
        debug_assert!(!t.is_variable());
        self.bindings.insert(v, t)
    }

    pub fn remove(&mut self, v: &Variable) -> Option<Term> {
        self.bindings.remove(v)
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.bindings.contains_key(v)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> BTreeSet<Variable> {
        self.bindings.keys().cloned().collect()
    }

    /// Restriction to `vars`.
    pub fn project<'a>(&self, vars: impl IntoIterator<Item = &'a Variable>) -> SolutionMapping {
        vars.into_iter().filter_map(|v| self.bindings.get(v).map(|t| (v.clone(), t.clone()))).collect()
    }

    /// Drops bindings to the unbound marker, so that "unbound" and "bound to
    /// the marker" compare equal.
    pub fn without_markers(&self) -> SolutionMapping {
        self.bindings.iter().filter(|(_, t)| !t.is_unbound_marker()).map(|(v, t)| (v.clone(), t.clone())).collect()
    }

    /// μ1 ∪ μ2 for compatible mappings.
    pub fn merge(&self, other: &SolutionMapping) -> SolutionMapping {
        let mut out = self.clone();
        for (v, t) in &other.bindings {
            out.bindings.entry(v.clone()).or_insert_with(|| t.clone());
        }
        out
    }
}

impl FromIterator<(Variable, Term)> for SolutionMapping {
    fn from_iter<I: IntoIterator<Item = (Variable, Term)>>(iter: I) -> Self {
        SolutionMapping { bindings: iter.into_iter().collect() }
    }
}

impl fmt::Display for SolutionMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}→{t}")?;
        }
        f.write_str("}")
    }
}

pub type SolutionSet = BTreeSet<SolutionMapping>;

/// True iff the mappings agree on every shared variable.
pub fn compatible(a: &SolutionMapping, b: &SolutionMapping) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().all(|(v, t)| large.get(v).is_none_or(|u| u == t))
}

fn shares_domain(a: &SolutionMapping, b: &SolutionMapping) -> bool {
    a.bindings.keys().any(|v| b.contains(v))
}

pub fn join(a: &SolutionSet, b: &SolutionSet) -> SolutionSet {
    let mut out = SolutionSet::new();
    for m1 in a {
        for m2 in b {
            if compatible(m1, m2) {
                out.insert(m1.merge(m2));
            }
        }
    }
    out
}

pub fn union(a: &SolutionSet, b: &SolutionSet) -> SolutionSet {
    a.union(b).cloned().collect()
}

/// Keeps μ ∈ a when every μ′ ∈ b is incompatible with μ or shares no
/// variable with it.
pub fn minus_m(a: &SolutionSet, b: &SolutionSet) -> SolutionSet {
    a.iter().filter(|m1| b.iter().all(|m2| !compatible(m1, m2) || !shares_domain(m1, m2))).cloned().collect()
}

/// TSV rendering of SELECT results: a header of `?name` columns, one row per
/// solution, `UNBOUND` for missing values.
pub fn select_to_tsv(vars: &[Variable], rows: &SolutionSet) -> String {
    let mut out: String = vars.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\t");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = vars
            .iter()
            .map(|v| match row.get(v) {
                Some(t) if !t.is_unbound_marker() => t.to_string(),
                _ => "UNBOUND".to_owned(),
            })
            .collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(pairs: &[(&str, Term)]) -> SolutionMapping {
        pairs.iter().map(|(v, t)| (Variable::new(*v), t.clone())).collect()
    }

    fn i(n: &str) -> Term {
        Term::iri(format!("urn:x:{n}"))
    }

    #[test]
    fn compatibility() {
        assert!(compatible(&mu(&[("x", i("s"))]), &mu(&[("x", i("s")), ("m", i("a"))])));
        assert!(!compatible(&mu(&[("v", Term::integer(1))]), &mu(&[("v", Term::integer(3)), ("w", Term::integer(2))])));
        assert!(compatible(&mu(&[("x", i("s"))]), &SolutionMapping::new()));
    }

    #[test]
    fn minus_cases() {
        let a: SolutionSet = [mu(&[("x", i("s")), ("n", i("o"))])].into();
        let b: SolutionSet = [mu(&[("x", i("s")), ("m", i("a"))])].into();
        assert!(minus_m(&a, &b).is_empty());
        assert_eq!(minus_m(&a, &SolutionSet::new()), a);
        let c: SolutionSet = [mu(&[("a", Term::integer(1))])].into();
        let d: SolutionSet = [mu(&[("b", Term::integer(2))])].into();
        assert_eq!(minus_m(&c, &d), c);
    }

    #[test]
    fn identities() {
        let a: SolutionSet = [mu(&[("x", i("s"))]), mu(&[("y", i("t"))])].into();
        let unit: SolutionSet = [SolutionMapping::new()].into();
        assert_eq!(join(&a, &unit), a);
        assert_eq!(union(&a, &SolutionSet::new()), a);
    }

    #[test]
    fn tsv_marks_unbound() {
        let rows: SolutionSet = [mu(&[("v", Term::integer(1)), ("w", Term::unbound())])].into();
        let tsv = select_to_tsv(&[Variable::new("v"), Variable::new("w")], &rows);
        assert_eq!(tsv, "?v\t?w\n\"1\"^^<http://www.w3.org/2001/XMLSchema#integer>\tUNBOUND\n");
    }
}
