//! SPARQL text for algebra values. The output reparses to the same tree,
//! which the fuzzer relies on to exercise the parser.

use std::fmt::{self, Write};

use super::{FilterAtom, FilterExpr, GraphPattern, Projection, Query, QueryForm};
use crate::rdf::Triple;

impl fmt::Display for FilterAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterAtom::Term(t) => write!(f, "{t}"),
            FilterAtom::Arith(op, l, r) => write!(f, "({l} {op} {r})"),
        }
    }
}

impl fmt::Display for FilterExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterExpr::Compare(op, l, r) => write!(f, "({l} {op} {r})"),
            FilterExpr::And(l, r) => write!(f, "({l} && {r})"),
            FilterExpr::Or(l, r) => write!(f, "({l} || {r})"),
            FilterExpr::Not(e) => write!(f, "(!{e})"),
            FilterExpr::Bound(v) => write!(f, "BOUND({v})"),
            FilterExpr::True => f.write_str("true"),
            FilterExpr::False => f.write_str("false"),
        }
    }
}

fn write_triples(out: &mut String, triples: &[Triple]) {
    for t in triples {
        let _ = write!(out, "{} {} {} . ", t.subject, t.predicate, t.object);
    }
}

fn write_group(out: &mut String, p: &GraphPattern) {
    out.push_str("{ ");
    write_elements(out, p);
    out.push('}');
}

/// Group elements that parse back to exactly `p`.
fn write_elements(out: &mut String, p: &GraphPattern) {
    match p {
        GraphPattern::Bgp(ts) => write_triples(out, ts),
        GraphPattern::And(a, b) => {
            write_group(out, a);
            out.push(' ');
            write_group(out, b);
            out.push(' ');
        }
        GraphPattern::Union(a, b) => {
            write_group(out, a);
            out.push_str(" UNION ");
            write_group(out, b);
            out.push(' ');
        }
        GraphPattern::Minus(a, b) => {
            write_group(out, a);
            out.push_str(" MINUS ");
            write_group(out, b);
            out.push(' ');
        }
        GraphPattern::Opt(a, b, r) => {
            write_group(out, a);
            out.push_str(" OPTIONAL { ");
            write_group(out, b);
            if *r != FilterExpr::True {
                let _ = write!(out, " FILTER({r})");
            }
            out.push_str(" } ");
        }
        GraphPattern::Fe(a, b) | GraphPattern::Fne(a, b) => {
            write_group(out, a);
            out.push_str(if matches!(p, GraphPattern::Fe(..)) { " FILTER EXISTS " } else { " FILTER NOT EXISTS " });
            write_group(out, b);
            out.push(' ');
        }
        GraphPattern::Filter(a, r) => {
            write_group(out, a);
            let _ = write!(out, " FILTER({r}) ");
        }
    }
}

impl fmt::Display for GraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_group(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            QueryForm::Select(Projection::Star) => f.write_str("SELECT *")?,
            QueryForm::Select(Projection::Vars(vs)) => {
                f.write_str("SELECT")?;
                for v in vs {
                    write!(f, " {v}")?;
                }
            }
            QueryForm::Construct(template) => {
                let mut s = String::new();
                write_triples(&mut s, template);
                write!(f, "CONSTRUCT {{ {s}}}")?;
            }
        }
        write!(f, " WHERE {}", self.pattern)
    }
}
