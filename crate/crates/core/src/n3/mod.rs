//! Notation3 terms, graph patterns and rules, with a reader and writer for
//! the subset the translator emits.

mod syntax;
pub mod vocab;

use std::collections::BTreeSet;

pub use syntax::{parse_n3, serialize_n3};

use crate::rdf::{Term, Triple, Variable};

/// Variable standing for the deductive closure in includes/notIncludes
/// triples.
pub const CLOSURE_VAR: &str = "__closure";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum N3Term {
    Atomic(Term),
    Graph(N3Gp),
    List(Vec<N3Term>),
}

impl N3Term {
    pub fn iri(value: impl Into<String>) -> Self {
        N3Term::Atomic(Term::iri(value))
    }

    pub fn var(name: impl Into<String>) -> Self {
        N3Term::Atomic(Term::var(name))
    }

    pub fn closure() -> Self {
        N3Term::var(CLOSURE_VAR)
    }

    pub fn as_atomic(&self) -> Option<&Term> {
        match self {
            N3Term::Atomic(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_variable(&self) -> Option<&Variable> {
        self.as_atomic().and_then(Term::as_variable)
    }

    pub fn is_closure(&self) -> bool {
        self.as_variable().is_some_and(|v| v.name() == CLOSURE_VAR)
    }

    /// True when the term contains no variables at any depth.
    pub fn is_closed(&self) -> bool {
        match self {
            N3Term::Atomic(t) => !t.is_variable(),
            N3Term::Graph(g) => g.iter().all(N3Triple::is_closed),
            N3Term::List(items) => items.iter().all(N3Term::is_closed),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>, with_closure: bool) {
        match self {
            N3Term::Atomic(Term::Variable(v)) => {
                if with_closure || v.name() != CLOSURE_VAR {
                    out.insert(v.clone());
                }
            }
            N3Term::Atomic(_) => {}
            N3Term::Graph(g) => {
                for t in g.iter() {
                    t.collect_vars(out, with_closure);
                }
            }
            N3Term::List(items) => {
                for i in items {
                    i.collect_vars(out, with_closure);
                }
            }
        }
    }

    /// Applies `f` to every atomic term, at any depth.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Term) -> N3Term) -> N3Term {
        match self {
            N3Term::Atomic(t) => f(t),
            N3Term::Graph(g) => N3Term::Graph(g.map_atoms(f)),
            N3Term::List(items) => N3Term::List(items.iter().map(|i| i.map_atoms(f)).collect()),
        }
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            N3Term::Atomic(t) => f(t),
            N3Term::Graph(g) => g.iter().for_each(|t| t.visit_atoms(f)),
            N3Term::List(items) => items.iter().for_each(|i| i.visit_atoms(f)),
        }
    }
}

impl From<Term> for N3Term {
    fn from(t: Term) -> Self {
        N3Term::Atomic(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct N3Triple {
    pub subject: N3Term,
    pub predicate: N3Term,
    pub object: N3Term,
}

impl N3Triple {
    pub fn new(subject: impl Into<N3Term>, predicate: impl Into<N3Term>, object: impl Into<N3Term>) -> Self {
        N3Triple { subject: subject.into(), predicate: predicate.into(), object: object.into() }
    }

    pub fn terms(&self) -> [&N3Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn is_closed(&self) -> bool {
        self.terms().iter().all(|t| t.is_closed())
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>, with_closure: bool) {
        for t in self.terms() {
            t.collect_vars(out, with_closure);
        }
    }

    /// The plain RDF triple, if every position is atomic.
    pub fn as_plain(&self) -> Option<Triple> {
        Some(Triple::new(
            self.subject.as_atomic()?.clone(),
            self.predicate.as_atomic()?.clone(),
            self.object.as_atomic()?.clone(),
        ))
    }

    pub fn predicate_iri(&self) -> Option<&str> {
        match &self.predicate {
            N3Term::Atomic(Term::Iri(i)) => Some(i),
            _ => None,
        }
    }

    pub fn map_atoms(&self, f: &mut impl FnMut(&Term) -> N3Term) -> N3Triple {
        N3Triple {
            subject: self.subject.map_atoms(f),
            predicate: self.predicate.map_atoms(f),
            object: self.object.map_atoms(f),
        }
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        for t in self.terms() {
            t.visit_atoms(f);
        }
    }
}

impl From<Triple> for N3Triple {
    fn from(t: Triple) -> Self {
        N3Triple::new(t.subject, t.predicate, t.object)
    }
}

/// An N3 graph pattern: a set of N3 triples kept in insertion order so that
/// serialization follows construction order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct N3Gp {
    triples: Vec<N3Triple>,
}

impl N3Gp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, t: N3Triple) -> bool {
        if self.triples.contains(&t) {
            false
        } else {
            self.triples.push(t);
            true
        }
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = N3Triple>) {
        for t in other {
            self.insert(t);
        }
    }

    pub fn union(mut self, other: N3Gp) -> N3Gp {
        self.extend(other);
        self
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, N3Triple> {
        self.triples.iter()
    }

    /// Variables at any depth, excluding the closure placeholder.
    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            t.collect_vars(&mut out, false);
        }
        out
    }

    /// Variables at any depth, including the closure placeholder.
    pub fn all_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            t.collect_vars(&mut out, true);
        }
        out
    }

    /// Set equality, ignoring insertion order.
    pub fn set_eq(&self, other: &N3Gp) -> bool {
        let a: BTreeSet<&N3Triple> = self.triples.iter().collect();
        let b: BTreeSet<&N3Triple> = other.triples.iter().collect();
        a == b
    }

    pub fn map_atoms(&self, f: &mut impl FnMut(&Term) -> N3Term) -> N3Gp {
        self.triples.iter().map(|t| t.map_atoms(f)).collect()
    }
}

impl FromIterator<N3Triple> for N3Gp {
    fn from_iter<I: IntoIterator<Item = N3Triple>>(iter: I) -> Self {
        let mut g = N3Gp::new();
        g.extend(iter);
        g
    }
}

impl IntoIterator for N3Gp {
    type Item = N3Triple;
    type IntoIter = std::vec::IntoIter<N3Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.into_iter()
    }
}

impl<'a> IntoIterator for &'a N3Gp {
    type Item = &'a N3Triple;
    type IntoIter = std::slice::Iter<'a, N3Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct N3Rule {
    pub premise: N3Gp,
    pub conclusion: N3Gp,
    pub mode: Mode,
}

impl N3Rule {
    pub fn forward(premise: N3Gp, conclusion: N3Gp) -> Self {
        N3Rule { premise, conclusion, mode: Mode::Forward }
    }

    pub fn backward(premise: N3Gp, conclusion: N3Gp) -> Self {
        N3Rule { premise, conclusion, mode: Mode::Backward }
    }

    /// Conclusion variables the premise does not bind; each firing replaces
    /// them with fresh blank nodes.
    pub fn existential_vars(&self) -> BTreeSet<Variable> {
        let bound = self.premise.vars();
        self.conclusion.vars().into_iter().filter(|v| !bound.contains(v)).collect()
    }
}

/// A parsed or generated N3 document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct N3Doc {
    /// Prefixes used when writing, in declaration order.
    pub prefixes: Vec<(String, String)>,
    pub facts: N3Gp,
    pub rules: Vec<N3Rule>,
}

impl N3Doc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_prefix(mut self, prefix: &str, ns: &str) -> Self {
        self.add_prefix(prefix, ns);
        self
    }

    pub fn add_prefix(&mut self, prefix: &str, ns: &str) {
        if let Some(entry) = self.prefixes.iter_mut().find(|(p, _)| p == prefix) {
            entry.1 = ns.to_owned();
        } else {
            self.prefixes.push((prefix.to_owned(), ns.to_owned()));
        }
    }
}
