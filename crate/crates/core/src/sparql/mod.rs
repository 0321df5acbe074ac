//! SPARQL query algebra and the reader/writer for the supported fragment.

mod parser;
mod printer;

use std::collections::{BTreeMap, BTreeSet};

pub use parser::{is_reserved_variable, parse_query};

use crate::error::ValidationError;
use crate::rdf::value::{ArithOp, CompareOp};
use crate::rdf::{Term, Triple, Variable};

/// An operand of a comparison. Variables appear as `Term::Variable`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterAtom {
    Term(Term),
    Arith(ArithOp, Box<FilterAtom>, Box<FilterAtom>),
}

impl FilterAtom {
    pub fn var(name: &str) -> Self {
        FilterAtom::Term(Term::var(name))
    }

    pub fn arith(op: ArithOp, l: FilterAtom, r: FilterAtom) -> Self {
        FilterAtom::Arith(op, Box::new(l), Box::new(r))
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            FilterAtom::Term(Term::Variable(v)) => {
                out.insert(v.clone());
            }
            FilterAtom::Term(_) => {}
            FilterAtom::Arith(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterExpr {
    Compare(CompareOp, FilterAtom, FilterAtom),
    And(Box<FilterExpr>, Box<FilterExpr>),
    Or(Box<FilterExpr>, Box<FilterExpr>),
    Not(Box<FilterExpr>),
    Bound(Variable),
    True,
    False,
}

impl FilterExpr {
    pub fn compare(op: CompareOp, l: FilterAtom, r: FilterAtom) -> Self {
        FilterExpr::Compare(op, l, r)
    }

    pub fn and(l: FilterExpr, r: FilterExpr) -> Self {
        FilterExpr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: FilterExpr, r: FilterExpr) -> Self {
        FilterExpr::Or(Box::new(l), Box::new(r))
    }

    pub fn negate(e: FilterExpr) -> Self {
        FilterExpr::Not(Box::new(e))
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            FilterExpr::Compare(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            FilterExpr::And(l, r) | FilterExpr::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            FilterExpr::Not(e) => e.collect_vars(out),
            FilterExpr::Bound(v) => {
                out.insert(v.clone());
            }
            FilterExpr::True | FilterExpr::False => {}
        }
    }
}

/// The graph-pattern algebra. `Opt` always carries a filter, `True` when the
/// source had none.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphPattern {
    Bgp(Vec<Triple>),
    And(Box<GraphPattern>, Box<GraphPattern>),
    Union(Box<GraphPattern>, Box<GraphPattern>),
    Minus(Box<GraphPattern>, Box<GraphPattern>),
    Opt(Box<GraphPattern>, Box<GraphPattern>, FilterExpr),
    Fe(Box<GraphPattern>, Box<GraphPattern>),
    Fne(Box<GraphPattern>, Box<GraphPattern>),
    Filter(Box<GraphPattern>, FilterExpr),
}

impl GraphPattern {
    /// A BGP with duplicate triples removed, first occurrence kept.
    pub fn bgp(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut out: Vec<Triple> = Vec::new();
        for t in triples {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        GraphPattern::Bgp(out)
    }

    pub fn and(a: GraphPattern, b: GraphPattern) -> Self {
        GraphPattern::And(Box::new(a), Box::new(b))
    }

    pub fn union(a: GraphPattern, b: GraphPattern) -> Self {
        GraphPattern::Union(Box::new(a), Box::new(b))
    }

    pub fn minus(a: GraphPattern, b: GraphPattern) -> Self {
        GraphPattern::Minus(Box::new(a), Box::new(b))
    }

    pub fn opt(a: GraphPattern, b: GraphPattern, r: FilterExpr) -> Self {
        GraphPattern::Opt(Box::new(a), Box::new(b), r)
    }

    pub fn fe(a: GraphPattern, b: GraphPattern) -> Self {
        GraphPattern::Fe(Box::new(a), Box::new(b))
    }

    pub fn fne(a: GraphPattern, b: GraphPattern) -> Self {
        GraphPattern::Fne(Box::new(a), Box::new(b))
    }

    pub fn filter(a: GraphPattern, r: FilterExpr) -> Self {
        GraphPattern::Filter(Box::new(a), r)
    }

    /// Nesting depth; a BGP has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            GraphPattern::Bgp(_) => 0,
            GraphPattern::Filter(p, _) => 1 + p.depth(),
            GraphPattern::And(a, b)
            | GraphPattern::Union(a, b)
            | GraphPattern::Minus(a, b)
            | GraphPattern::Opt(a, b, _)
            | GraphPattern::Fe(a, b)
            | GraphPattern::Fne(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Constructor names used anywhere in the pattern.
    pub fn constructors(&self) -> BTreeSet<&'static str> {
        let mut out = BTreeSet::new();
        self.collect_constructors(&mut out);
        out
    }

    fn collect_constructors(&self, out: &mut BTreeSet<&'static str>) {
        let name = match self {
            GraphPattern::Bgp(_) => "BGP",
            GraphPattern::And(..) => "AND",
            GraphPattern::Union(..) => "UNION",
            GraphPattern::Minus(..) => "MINUS",
            GraphPattern::Opt(..) => "OPT",
            GraphPattern::Fe(..) => "FE",
            GraphPattern::Fne(..) => "FNE",
            GraphPattern::Filter(..) => "FILTER",
        };
        out.insert(name);
        match self {
            GraphPattern::Bgp(_) => {}
            GraphPattern::Filter(p, _) => p.collect_constructors(out),
            GraphPattern::And(a, b)
            | GraphPattern::Union(a, b)
            | GraphPattern::Minus(a, b)
            | GraphPattern::Opt(a, b, _)
            | GraphPattern::Fe(a, b)
            | GraphPattern::Fne(a, b) => {
                a.collect_constructors(out);
                b.collect_constructors(out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Projection {
    Star,
    Vars(Vec<Variable>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QueryForm {
    Select(Projection),
    /// Template triples; blank nodes are allowed here.
    Construct(Vec<Triple>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub form: QueryForm,
    pub pattern: GraphPattern,
    pub prefixes: BTreeMap<String, String>,
}

impl Query {
    pub fn select(projection: Projection, pattern: GraphPattern) -> Self {
        Query { form: QueryForm::Select(projection), pattern, prefixes: BTreeMap::new() }
    }

    pub fn construct(template: Vec<Triple>, pattern: GraphPattern) -> Self {
        Query { form: QueryForm::Construct(template), pattern, prefixes: BTreeMap::new() }
    }

    /// Output variables of a SELECT, in projection order.
    pub fn projection(&self) -> Option<Vec<Variable>> {
        match &self.form {
            QueryForm::Select(Projection::Star) => Some(crate::scope::sv_ordered(&self.pattern)),
            QueryForm::Select(Projection::Vars(vs)) => Some(vs.clone()),
            QueryForm::Construct(_) => None,
        }
    }
}

/// Rejects CONSTRUCT templates that mention variables the pattern can never
/// bind.
pub fn validate_query(q: &Query) -> Result<(), ValidationError> {
    let QueryForm::Construct(template) = &q.form else {
        return Ok(());
    };
    let scope = crate::scope::sv(&q.pattern);
    let unbindable: BTreeSet<String> = template
        .iter()
        .flat_map(|t| t.terms())
        .filter_map(Term::as_variable)
        .filter(|v| !scope.contains(*v))
        .map(|v| v.name().to_owned())
        .collect();
    if unbindable.is_empty() {
        Ok(())
    } else {
        Err(ValidationError { unbindable })
    }
}
