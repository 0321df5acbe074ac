//! RDF terms, triples and ground graphs, plus the N-Triples and Turtle-subset
//! readers used to load data.

mod ntriples;
mod turtle;
pub mod value;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use ntriples::{parse_ntriples, serialize_ntriples};
pub use turtle::parse_turtle;

use crate::error::SyntaxError;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

/// Blank-node label prefix set aside for the unbound marker. User input may
/// not use it.
pub const RESERVED_BLANK_PREFIX: &str = "ub_";
const UNBOUND_LABEL: &str = "ub_0";

/// A query variable. The stored name never includes the `?` sigil.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty() && !name.starts_with('?'));
        Variable(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Literal {
    pub lexical: String,
    pub datatype: String,
    pub lang: Option<String>,
}

impl Literal {
    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: datatype.into(), lang: None }
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Self::typed(lexical, XSD_STRING)
    }

    pub fn lang_string(lexical: impl Into<String>, lang: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: RDF_LANG_STRING.to_owned(),
            lang: Some(lang.into().to_ascii_lowercase()),
        }
    }

    pub fn integer(value: i64) -> Self {
        Self::typed(value.to_string(), XSD_INTEGER)
    }
}

/// An RDF term. The derived ordering (IRI < blank node < literal < variable,
/// then lexicographic) is the canonical term order used for serialization.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal(Literal),
    Variable(Variable),
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Self {
        Term::Iri(value.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::BlankNode(label.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(Variable::new(name))
    }

    pub fn integer(value: i64) -> Self {
        Term::Literal(Literal::integer(value))
    }

    pub fn string(value: impl Into<String>) -> Self {
        Term::Literal(Literal::string(value))
    }

    /// The distinguished term standing for a variable left unbound.
    pub fn unbound() -> Self {
        Term::BlankNode(UNBOUND_LABEL.to_owned())
    }

    pub fn is_unbound_marker(&self) -> bool {
        matches!(self, Term::BlankNode(l) if l == UNBOUND_LABEL)
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn as_variable(&self) -> Option<&Variable> {
        match self {
            Term::Variable(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }
}

impl From<Variable> for Term {
    fn from(v: Variable) -> Self {
        Term::Variable(v)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

/// Writes the term in N-Triples syntax; variables use `?name`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Variable(v) => write!(f, "{v}"),
            Term::Literal(lit) => {
                write!(f, "\"{}\"", escape_string(&lit.lexical))?;
                if let Some(lang) = &lit.lang {
                    write!(f, "@{lang}")
                } else if lit.datatype != XSD_STRING {
                    write!(f, "^^<{}>", lit.datatype)
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        Triple { subject, predicate, object }
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn is_ground(&self) -> bool {
        self.terms().iter().all(|t| !t.is_variable())
    }

    /// Subject is an IRI or blank node, predicate an IRI, object not a
    /// variable.
    pub fn is_well_formed(&self) -> bool {
        matches!(self.subject, Term::Iri(_) | Term::BlankNode(_))
            && self.predicate.is_iri()
            && !self.object.is_variable()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A finite set of triples.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Graph {
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = Triple>) {
        self.triples.extend(other);
    }

    pub fn is_ground(&self) -> bool {
        self.triples.iter().all(Triple::is_ground)
    }

    pub fn is_subset(&self, other: &Graph) -> bool {
        self.triples.is_subset(&other.triples)
    }

    pub fn blank_labels(&self) -> BTreeSet<String> {
        self.iter()
            .flat_map(|t| t.terms())
            .filter_map(|t| match t {
                Term::BlankNode(l) => Some(l.clone()),
                _ => None,
            })
            .collect()
    }

    /// Triples whose predicate is one of `predicates`.
    pub fn restrict_to_predicates(&self, predicates: &BTreeSet<Term>) -> Graph {
        self.iter().filter(|t| predicates.contains(&t.predicate)).cloned().collect()
    }

    /// Renames every blank node `_:b` to `_:b_f<ordinal>` so graphs loaded
    /// from different files never share blank nodes.
    pub fn rename_blanks_apart(&self, ordinal: usize) -> Graph {
        let rename = |t: &Term| match t {
            Term::BlankNode(l) if !t.is_unbound_marker() => Term::BlankNode(format!("{l}_f{ordinal}")),
            other => other.clone(),
        };
        self.iter().map(|t| Triple::new(rename(&t.subject), rename(&t.predicate), rename(&t.object))).collect()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph { triples: iter.into_iter().collect() }
    }
}

impl IntoIterator for Graph {
    type Item = Triple;
    type IntoIter = std::collections::btree_set::IntoIter<Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.into_iter()
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// Hash indexes over a graph for pattern lookup.
pub struct GraphIndex<'a> {
    all: Vec<&'a Triple>,
    by_s: BTreeMap<&'a Term, Vec<&'a Triple>>,
    by_p: BTreeMap<&'a Term, Vec<&'a Triple>>,
    by_o: BTreeMap<&'a Term, Vec<&'a Triple>>,
}

impl<'a> GraphIndex<'a> {
    pub fn new(graph: &'a Graph) -> Self {
        let mut index = GraphIndex {
            all: Vec::with_capacity(graph.len()),
            by_s: BTreeMap::new(),
            by_p: BTreeMap::new(),
            by_o: BTreeMap::new(),
        };
        for t in graph {
            index.all.push(t);
            index.by_s.entry(&t.subject).or_default().push(t);
            index.by_p.entry(&t.predicate).or_default().push(t);
            index.by_o.entry(&t.object).or_default().push(t);
        }
        index
    }

    /// Candidate triples for a pattern whose positions are `Some` when bound.
    /// Every returned triple still has to be checked against the pattern.
    pub fn candidates(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> &[&'a Triple] {
        const EMPTY: &[&Triple] = &[];
        let mut best: &[&'a Triple] = &self.all;
        let lookups = [(s, &self.by_s), (p, &self.by_p), (o, &self.by_o)];
        for (key, map) in lookups {
            if let Some(key) = key {
                match map.get(key) {
                    Some(v) if v.len() < best.len() => best = v,
                    Some(_) => {}
                    None => return EMPTY,
                }
            }
        }
        best
    }
}

pub(crate) fn check_iri(iri: &str) -> Result<(), String> {
    if iri.is_empty() {
        return Err("empty IRI".into());
    }
    if let Some(c) =
        iri.chars().find(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
    {
        return Err(format!("invalid character {c:?} in IRI <{iri}>"));
    }
    Ok(())
}

pub(crate) fn check_blank_label(label: &str, line: usize, column: usize) -> Result<(), SyntaxError> {
    if label.starts_with(RESERVED_BLANK_PREFIX) {
        return Err(SyntaxError::new(
            line,
            column,
            format!("blank node label _:{label} uses the reserved prefix _:{RESERVED_BLANK_PREFIX}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_order_puts_iris_before_blanks_before_literals() {
        let mut terms = vec![Term::integer(1), Term::blank("b"), Term::iri("urn:z")];
        terms.sort();
        assert_eq!(terms, vec![Term::iri("urn:z"), Term::blank("b"), Term::integer(1)]);
    }

    #[test]
    fn literal_identity_is_lexical() {
        assert_ne!(Term::Literal(Literal::typed("1", XSD_INTEGER)), Term::Literal(Literal::typed("01", XSD_INTEGER)));
    }

    #[test]
    fn rename_apart_keeps_unbound_marker() {
        let g: Graph = [Triple::new(Term::blank("a"), Term::iri("urn:p"), Term::unbound())].into_iter().collect();
        let renamed = g.rename_blanks_apart(2);
        let t = renamed.iter().next().unwrap();
        assert_eq!(t.subject, Term::blank("a_f2"));
        assert!(t.object.is_unbound_marker());
    }

    #[test]
    fn index_candidates_narrow_by_bound_positions() {
        let g: Graph = [
            Triple::new(Term::iri("urn:a"), Term::iri("urn:p"), Term::iri("urn:b")),
            Triple::new(Term::iri("urn:b"), Term::iri("urn:p"), Term::iri("urn:c")),
            Triple::new(Term::iri("urn:a"), Term::iri("urn:q"), Term::iri("urn:c")),
        ]
        .into_iter()
        .collect();
        let idx = GraphIndex::new(&g);
        assert_eq!(idx.candidates(Some(&Term::iri("urn:a")), None, None).len(), 2);
        assert!(idx.candidates(Some(&Term::iri("urn:zz")), None, None).is_empty());
        assert_eq!(idx.candidates(None, None, None).len(), 3);
    }
}
