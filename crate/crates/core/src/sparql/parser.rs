use std::collections::BTreeMap;

use super::{FilterAtom, FilterExpr, GraphPattern, Projection, Query, QueryForm};
use crate::error::ParseError;
use crate::lexer::{tokenize, Dialect, Tok, Token};
use crate::rdf::value::{ArithOp, CompareOp};
use crate::rdf::{check_iri, Literal, Term, Triple, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};

const WELL_KNOWN: &[(&str, &str)] = &[
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
];

/// Keywords that start constructs outside the supported fragment.
const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "HAVING", "GRAPH", "BIND", "VALUES", "SERVICE", "GROUP", "ORDER", "LIMIT", "OFFSET", "ASK", "DESCRIBE", "FROM",
    "BASE", "NAMED", "LOAD", "INSERT", "DELETE",
];

/// Parses a query in the supported SPARQL fragment into the algebra.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let tokens = tokenize(text, Dialect::Sparql)?;
    let mut p = Parser { tokens: &tokens, pos: 0, prefixes: BTreeMap::new() };
    p.query()
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    prefixes: BTreeMap<String, String>,
}

/// A group's elements before the filters are attached.
enum Exists {
    Fe(GraphPattern),
    Fne(GraphPattern),
}

struct Group {
    pattern: Option<GraphPattern>,
    exists: Vec<Exists>,
    filters: Vec<FilterExpr>,
}

impl Group {
    fn pattern_with_exists(self) -> (GraphPattern, Vec<FilterExpr>) {
        let mut p = self.pattern.unwrap_or_else(|| GraphPattern::Bgp(Vec::new()));
        for e in self.exists {
            p = match e {
                Exists::Fe(inner) => GraphPattern::fe(p, inner),
                Exists::Fne(inner) => GraphPattern::fne(p, inner),
            };
        }
        (p, self.filters)
    }

    fn into_pattern(self) -> GraphPattern {
        let (p, filters) = self.pattern_with_exists();
        match fold_and(filters) {
            Some(r) => GraphPattern::filter(p, r),
            None => p,
        }
    }
}

fn fold_and(filters: Vec<FilterExpr>) -> Option<FilterExpr> {
    filters.into_iter().reduce(FilterExpr::and)
}

fn join(acc: Option<GraphPattern>, p: GraphPattern) -> GraphPattern {
    match acc {
        Some(a) => GraphPattern::and(a, p),
        None => p,
    }
}

/// Intermediate expression before it is split into boolean and atomic parts.
enum Expr {
    Atom(FilterAtom),
    Bool(FilterExpr),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&'a Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn next(&mut self) -> Result<&'a Token, ParseError> {
        let t = self.tokens.get(self.pos).ok_or_else(|| self.eof())?;
        self.pos += 1;
        Ok(t)
    }

    fn eof(&self) -> ParseError {
        let (line, column) = self.tokens.last().map(|t| (t.line, t.column)).unwrap_or((1, 1));
        ParseError::syntax(line, column, "unexpected end of query")
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.column),
            None => self.eof().position(),
        }
    }

    fn syntax_here(&self, msg: impl Into<String>) -> ParseError {
        let (l, c) = self.here();
        ParseError::syntax(l, c, msg)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek_tok().is_some_and(|t| t.is_punct(p))
    }

    fn at_word(&self, w: &str) -> bool {
        self.peek_tok().is_some_and(|t| t.is_word(w))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.at_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        let t = self.next()?;
        if t.tok.is_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(t, &format!("'{p}'")))
        }
    }

    fn unexpected(&self, t: &Token, wanted: &str) -> ParseError {
        if let Tok::Word(w) = &t.tok {
            if let Some(kw) = UNSUPPORTED_KEYWORDS.iter().find(|k| k.eq_ignore_ascii_case(w)) {
                return ParseError::unsupported(t.line, t.column, *kw);
            }
        }
        ParseError::syntax(t.line, t.column, format!("expected {wanted}, found {}", t.tok.describe()))
    }

    fn query(&mut self) -> Result<Query, ParseError> {
        for (p, ns) in WELL_KNOWN {
            self.prefixes.insert((*p).to_owned(), (*ns).to_owned());
        }
        let mut declared = BTreeMap::new();
        while self.at_word("PREFIX") {
            self.pos += 1;
            let t = self.next()?;
            let Tok::PName { prefix, local } = &t.tok else {
                return Err(ParseError::syntax(t.line, t.column, "expected prefix name"));
            };
            if !local.is_empty() {
                return Err(ParseError::syntax(t.line, t.column, "prefix declaration must end with ':'"));
            }
            let iri = self.next()?;
            let Tok::Iri(ns) = &iri.tok else {
                return Err(ParseError::syntax(iri.line, iri.column, "expected namespace IRI"));
            };
            self.prefixes.insert(prefix.clone(), ns.clone());
            declared.insert(prefix.clone(), ns.clone());
        }
        let t = self.next()?;
        let form = if t.tok.is_word("SELECT") {
            if !self.eat_word("DISTINCT") {
                self.eat_word("REDUCED");
            }
            if self.eat_punct("*") {
                QueryForm::Select(Projection::Star)
            } else {
                let mut vars = Vec::new();
                while let Some(Tok::Var(v)) = self.peek_tok() {
                    let tok = self.next()?;
                    let var = self.variable(v, tok)?;
                    if !vars.contains(&var) {
                        vars.push(var);
                    }
                }
                if vars.is_empty() {
                    if self.at_punct("(") {
                        let (l, c) = self.here();
                        return Err(ParseError::unsupported(l, c, "expression in SELECT"));
                    }
                    return Err(self.syntax_here("expected '*' or projection variables"));
                }
                QueryForm::Select(Projection::Vars(vars.into_iter().filter_map(|t| t.as_variable().cloned()).collect()))
            }
        } else if t.tok.is_word("CONSTRUCT") {
            self.expect_punct("{")?;
            let mut template = Vec::new();
            self.triples_until_close(&mut template, true)?;
            QueryForm::Construct(dedup(template))
        } else {
            return Err(self.unexpected(t, "SELECT or CONSTRUCT"));
        };
        self.eat_word("WHERE");
        if !self.at_punct("{") {
            let t = self.next()?;
            return Err(self.unexpected(t, "'{'"));
        }
        self.pos += 1;
        let pattern = self.group_body()?.into_pattern();
        if let Some(t) = self.peek() {
            return Err(self.unexpected(t, "end of query"));
        }
        Ok(Query { form, pattern, prefixes: declared })
    }

    /// Parses group elements after the opening brace up to and including the
    /// closing brace.
    fn group_body(&mut self) -> Result<Group, ParseError> {
        let mut group = Group { pattern: None, exists: Vec::new(), filters: Vec::new() };
        loop {
            let t = self.peek().ok_or_else(|| self.eof())?;
            match &t.tok {
                Tok::Punct("}") => {
                    self.pos += 1;
                    return Ok(group);
                }
                Tok::Punct(".") => {
                    self.pos += 1;
                }
                Tok::Punct("{") => {
                    self.pos += 1;
                    let mut p = self.group_body()?.into_pattern();
                    while self.eat_word("UNION") {
                        self.expect_punct("{")?;
                        let right = self.group_body()?.into_pattern();
                        p = GraphPattern::union(p, right);
                    }
                    group.pattern = Some(join(group.pattern.take(), p));
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("OPTIONAL") => {
                    self.pos += 1;
                    self.expect_punct("{")?;
                    let (inner, filters) = self.group_body()?.pattern_with_exists();
                    let r = fold_and(filters).unwrap_or(FilterExpr::True);
                    let left = group.pattern.take().unwrap_or_else(|| GraphPattern::Bgp(Vec::new()));
                    group.pattern = Some(GraphPattern::opt(left, inner, r));
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("MINUS") => {
                    self.pos += 1;
                    self.expect_punct("{")?;
                    let right = self.group_body()?.into_pattern();
                    let left = group.pattern.take().unwrap_or_else(|| GraphPattern::Bgp(Vec::new()));
                    group.pattern = Some(GraphPattern::minus(left, right));
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.pos += 1;
                    if self.eat_word("EXISTS") {
                        self.expect_punct("{")?;
                        group.exists.push(Exists::Fe(self.group_body()?.into_pattern()));
                    } else if self.at_word("NOT") {
                        self.pos += 1;
                        if !self.eat_word("EXISTS") {
                            return Err(self.syntax_here("expected EXISTS after NOT"));
                        }
                        self.expect_punct("{")?;
                        group.exists.push(Exists::Fne(self.group_body()?.into_pattern()));
                    } else {
                        let e = self.filter_constraint()?;
                        group.filters.push(e);
                    }
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("SELECT") => {
                    return Err(ParseError::unsupported(t.line, t.column, "subquery"));
                }
                Tok::Word(w) if UNSUPPORTED_KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(w)) => {
                    return Err(self.unexpected(t, "group element"));
                }
                _ => {
                    let mut triples = Vec::new();
                    self.triples_block(&mut triples, false)?;
                    group.pattern = Some(join(group.pattern.take(), GraphPattern::bgp(triples)));
                }
            }
        }
    }

    /// Triples separated by '.', ending before the next non-triple element.
    fn triples_block(&mut self, out: &mut Vec<Triple>, allow_blank: bool) -> Result<(), ParseError> {
        loop {
            self.triples_same_subject(out, allow_blank)?;
            if !self.eat_punct(".") {
                return Ok(());
            }
            match self.peek_tok() {
                Some(Tok::Punct("{" | "}")) | None => return Ok(()),
                Some(Tok::Word(w)) if is_group_keyword(w) => return Ok(()),
                _ => {}
            }
        }
    }

    fn triples_until_close(&mut self, out: &mut Vec<Triple>, allow_blank: bool) -> Result<(), ParseError> {
        loop {
            if self.eat_punct("}") {
                return Ok(());
            }
            if self.eat_punct(".") {
                continue;
            }
            self.triples_same_subject(out, allow_blank)?;
            if !self.at_punct("}") {
                self.expect_punct(".")?;
            }
        }
    }

    fn triples_same_subject(&mut self, out: &mut Vec<Triple>, allow_blank: bool) -> Result<(), ParseError> {
        let subject = self.node(allow_blank, "subject")?;
        loop {
            let predicate = self.verb()?;
            loop {
                let object = self.node(allow_blank, "object")?;
                out.push(Triple::new(subject.clone(), predicate.clone(), object));
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.eat_punct(";") {
                return Ok(());
            }
            while self.eat_punct(";") {}
            if matches!(self.peek_tok(), Some(Tok::Punct("." | "}")) | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Term, ParseError> {
        let t = self.next()?;
        let term = match &t.tok {
            Tok::Word(w) if w == "a" => Term::iri(RDF_TYPE),
            Tok::Var(v) => self.variable(v, t)?,
            Tok::Iri(_) | Tok::PName { .. } => self.iri_term(t)?,
            Tok::Punct("^" | "(" | "!") => return Err(ParseError::unsupported(t.line, t.column, "property path")),
            _ => return Err(self.unexpected(t, "predicate")),
        };
        if let Some(Tok::Punct("/" | "|" | "*" | "+" | "?")) = self.peek_tok() {
            let (l, c) = self.here();
            return Err(ParseError::unsupported(l, c, "property path"));
        }
        Ok(term)
    }

    fn node(&mut self, allow_blank: bool, role: &str) -> Result<Term, ParseError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Var(v) => self.variable(v, t),
            Tok::Blank(b) if allow_blank => {
                crate::rdf::check_blank_label(b, t.line, t.column)?;
                Ok(Term::blank(b.clone()))
            }
            Tok::Blank(_) => Err(ParseError::unsupported(t.line, t.column, "blank node in WHERE pattern")),
            Tok::Punct("[") => Err(ParseError::unsupported(t.line, t.column, "blank node property list")),
            Tok::Punct("(") => Err(ParseError::unsupported(t.line, t.column, "collection")),
            Tok::Iri(_) | Tok::PName { .. } => self.iri_term(t),
            Tok::Str(_) | Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) => self.literal(t),
            Tok::Word(w) if w == "true" || w == "false" => Ok(Term::Literal(Literal::typed(w.clone(), XSD_BOOLEAN))),
            _ => Err(self.unexpected(t, role)),
        }
    }

    fn variable(&self, name: &str, t: &Token) -> Result<Term, ParseError> {
        if is_reserved_variable(name) {
            return Err(ParseError::syntax(t.line, t.column, format!("variable name ?{name} is reserved")));
        }
        Ok(Term::var(name))
    }

    fn iri_term(&self, t: &Token) -> Result<Term, ParseError> {
        match &t.tok {
            Tok::Iri(i) => {
                check_iri(i).map_err(|m| ParseError::syntax(t.line, t.column, m))?;
                Ok(Term::iri(i.clone()))
            }
            Tok::PName { prefix, local } => {
                let ns = self
                    .prefixes
                    .get(prefix)
                    .ok_or_else(|| ParseError::syntax(t.line, t.column, format!("undeclared prefix '{prefix}:'")))?;
                Ok(Term::iri(format!("{ns}{local}")))
            }
            _ => Err(self.unexpected(t, "IRI")),
        }
    }

    /// String or numeric literal; the token has already been consumed.
    fn literal(&mut self, t: &Token) -> Result<Term, ParseError> {
        let lit = match &t.tok {
            Tok::Str(s) => match self.peek_tok() {
                Some(Tok::LangTag(l)) => {
                    self.pos += 1;
                    Literal::lang_string(s.clone(), l.clone())
                }
                Some(Tok::Punct("^^")) => {
                    self.pos += 1;
                    let dt = self.next()?;
                    match self.iri_term(dt)? {
                        Term::Iri(d) => Literal::typed(s.clone(), d),
                        _ => unreachable!(),
                    }
                }
                _ => Literal::string(s.clone()),
            },
            Tok::Integer(n) => Literal::typed(n.clone(), XSD_INTEGER),
            Tok::Decimal(n) => Literal::typed(n.clone(), XSD_DECIMAL),
            Tok::Double(n) => Literal::typed(n.clone(), XSD_DOUBLE),
            _ => return Err(self.unexpected(t, "literal")),
        };
        Ok(Term::Literal(lit))
    }

    /// `FILTER` argument: a bracketed expression or a built-in call.
    fn filter_constraint(&mut self) -> Result<FilterExpr, ParseError> {
        let (line, column) = self.here();
        if !self.at_punct("(") && !matches!(self.peek_tok(), Some(Tok::Word(_))) {
            return Err(self.syntax_here("expected '(' after FILTER"));
        }
        let e = self.primary()?;
        self.to_bool(e, line, column)
    }

    fn to_bool(&self, e: Expr, line: usize, column: usize) -> Result<FilterExpr, ParseError> {
        match e {
            Expr::Bool(b) => Ok(b),
            Expr::Atom(FilterAtom::Term(Term::Literal(l))) if l.datatype == XSD_BOOLEAN => match l.lexical.as_str() {
                "true" => Ok(FilterExpr::True),
                "false" => Ok(FilterExpr::False),
                _ => Err(ParseError::syntax(line, column, "malformed boolean literal")),
            },
            Expr::Atom(_) => {
                Err(ParseError::unsupported(line, column, "effective boolean value of a non-boolean term"))
            }
        }
    }

    fn to_atom(&self, e: Expr, line: usize, column: usize) -> Result<FilterAtom, ParseError> {
        match e {
            Expr::Atom(a) => Ok(a),
            Expr::Bool(FilterExpr::True) => Ok(FilterAtom::Term(Term::Literal(Literal::typed("true", XSD_BOOLEAN)))),
            Expr::Bool(FilterExpr::False) => Ok(FilterAtom::Term(Term::Literal(Literal::typed("false", XSD_BOOLEAN)))),
            Expr::Bool(_) => Err(ParseError::unsupported(line, column, "comparison of boolean expressions")),
        }
    }

    fn expression(&mut self) -> Result<Expr, ParseError> {
        let (line, column) = self.here();
        let mut e = self.conjunction()?;
        while self.eat_punct("||") {
            let (l2, c2) = self.here();
            let r = self.conjunction()?;
            let l = self.to_bool(e, line, column)?;
            e = Expr::Bool(FilterExpr::or(l, self.to_bool(r, l2, c2)?));
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> Result<Expr, ParseError> {
        let (line, column) = self.here();
        let mut e = self.relational()?;
        while self.eat_punct("&&") {
            let (l2, c2) = self.here();
            let r = self.relational()?;
            let l = self.to_bool(e, line, column)?;
            e = Expr::Bool(FilterExpr::and(l, self.to_bool(r, l2, c2)?));
        }
        Ok(e)
    }

    fn relational(&mut self) -> Result<Expr, ParseError> {
        let (line, column) = self.here();
        let l = self.additive()?;
        let op = match self.peek_tok() {
            Some(Tok::Punct("=")) => CompareOp::Eq,
            Some(Tok::Punct("!=")) => CompareOp::Ne,
            Some(Tok::Punct("<")) => CompareOp::Lt,
            Some(Tok::Punct("<=")) => CompareOp::Le,
            Some(Tok::Punct(">")) => CompareOp::Gt,
            Some(Tok::Punct(">=")) => CompareOp::Ge,
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("IN") => {
                let (l, c) = self.here();
                return Err(ParseError::unsupported(l, c, "IN"));
            }
            _ => return Ok(l),
        };
        self.pos += 1;
        let (l2, c2) = self.here();
        let r = self.additive()?;
        Ok(Expr::Bool(FilterExpr::compare(op, self.to_atom(l, line, column)?, self.to_atom(r, l2, c2)?)))
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let (line, column) = self.here();
        let mut e = self.multiplicative()?;
        loop {
            let op = match self.peek_tok() {
                Some(Tok::Punct("+")) => ArithOp::Add,
                Some(Tok::Punct("-")) => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.pos += 1;
            let (l2, c2) = self.here();
            let r = self.multiplicative()?;
            let l = self.to_atom(e, line, column)?;
            e = Expr::Atom(FilterAtom::arith(op, l, self.to_atom(r, l2, c2)?));
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let (line, column) = self.here();
        let mut e = self.unary()?;
        loop {
            let op = match self.peek_tok() {
                Some(Tok::Punct("*")) => ArithOp::Mul,
                Some(Tok::Punct("/")) => ArithOp::Div,
                _ => return Ok(e),
            };
            self.pos += 1;
            let (l2, c2) = self.here();
            let r = self.unary()?;
            let l = self.to_atom(e, line, column)?;
            e = Expr::Atom(FilterAtom::arith(op, l, self.to_atom(r, l2, c2)?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let (line, column) = self.here();
        if self.eat_punct("!") {
            let e = self.unary()?;
            return Ok(Expr::Bool(FilterExpr::negate(self.to_bool(e, line, column)?)));
        }
        if self.eat_punct("-") {
            let e = self.unary()?;
            return Ok(match e {
                Expr::Atom(FilterAtom::Term(Term::Literal(l))) if is_numeric(&l) => {
                    let lexical = match l.lexical.strip_prefix('-') {
                        Some(rest) => rest.to_owned(),
                        None => format!("-{}", l.lexical),
                    };
                    Expr::Atom(FilterAtom::Term(Term::Literal(Literal::typed(lexical, l.datatype))))
                }
                other => {
                    let a = self.to_atom(other, line, column)?;
                    Expr::Atom(FilterAtom::arith(ArithOp::Sub, FilterAtom::Term(Term::integer(0)), a))
                }
            });
        }
        if self.eat_punct("+") {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Punct("(") => {
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Var(v) => Ok(Expr::Atom(FilterAtom::Term(self.variable(v, t)?))),
            Tok::Iri(_) => Ok(Expr::Atom(FilterAtom::Term(self.iri_term(t)?))),
            Tok::PName { .. } => {
                if self.at_punct("(") {
                    return Err(ParseError::unsupported(t.line, t.column, format!("function {}", t.tok.describe())));
                }
                Ok(Expr::Atom(FilterAtom::Term(self.iri_term(t)?)))
            }
            Tok::Str(_) | Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) => {
                Ok(Expr::Atom(FilterAtom::Term(self.literal(t)?)))
            }
            Tok::Word(w) if w == "true" => Ok(Expr::Bool(FilterExpr::True)),
            Tok::Word(w) if w == "false" => Ok(Expr::Bool(FilterExpr::False)),
            Tok::Word(w) if w.eq_ignore_ascii_case("BOUND") => {
                self.expect_punct("(")?;
                let v = self.next()?;
                let Tok::Var(name) = &v.tok else {
                    return Err(self.unexpected(v, "variable"));
                };
                let var = self.variable(name, v)?;
                self.expect_punct(")")?;
                Ok(Expr::Bool(FilterExpr::Bound(var.as_variable().unwrap().clone())))
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("EXISTS") || w.eq_ignore_ascii_case("NOT") => {
                Err(ParseError::unsupported(t.line, t.column, "EXISTS inside a filter expression"))
            }
            Tok::Word(w) if self.at_punct("(") => {
                Err(ParseError::unsupported(t.line, t.column, format!("function {}", w.to_ascii_uppercase())))
            }
            _ => Err(self.unexpected(t, "expression")),
        }
    }
}

fn is_group_keyword(w: &str) -> bool {
    ["OPTIONAL", "MINUS", "FILTER", "UNION"].iter().any(|k| k.eq_ignore_ascii_case(w))
        || UNSUPPORTED_KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(w))
}

fn is_numeric(l: &Literal) -> bool {
    matches!(l.datatype.as_str(), XSD_INTEGER | XSD_DECIMAL | XSD_DOUBLE)
}

fn dedup(triples: Vec<Triple>) -> Vec<Triple> {
    let mut out: Vec<Triple> = Vec::new();
    for t in triples {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// Names the translator mints for fresh variables: `<x>_rl<k>`, `tmp_<k>`,
/// and the closure placeholder.
pub fn is_reserved_variable(name: &str) -> bool {
    if name == "__closure" {
        return true;
    }
    if let Some(k) = name.strip_prefix("tmp_") {
        if !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()) {
            return true;
        }
    }
    name.match_indices("_rl").any(|(i, _)| name[i + 3..].starts_with(|c: char| c.is_ascii_digit()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparql::validate_query;

    const EX: &str = "http://example.org/#";

    fn ex(l: &str) -> Term {
        Term::iri(format!("{EX}{l}"))
    }

    fn t(s: Term, p: Term, o: Term) -> Triple {
        Triple::new(s, p, o)
    }

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn parse(body: &str) -> Query {
        parse_query(&format!("PREFIX : <{EX}>\n{body}")).unwrap()
    }

    #[test]
    fn query_two_is_a_construct_over_one_bgp() {
        let q = parse("CONSTRUCT {?x a :Person . } WHERE {?x a :Researcher . }");
        assert_eq!(q.form, QueryForm::Construct(vec![t(v("x"), Term::iri(RDF_TYPE), ex("Person"))]));
        assert_eq!(q.pattern, GraphPattern::Bgp(vec![t(v("x"), Term::iri(RDF_TYPE), ex("Researcher"))]));
    }

    #[test]
    fn listing_one_nests_exists_inside_minus() {
        let q = parse("SELECT * WHERE { ?x :p ?n . MINUS { ?x :q ?m . FILTER EXISTS {?m :r ?n}}}");
        let expected = GraphPattern::minus(
            GraphPattern::Bgp(vec![t(v("x"), ex("p"), v("n"))]),
            GraphPattern::fe(
                GraphPattern::Bgp(vec![t(v("x"), ex("q"), v("m"))]),
                GraphPattern::Bgp(vec![t(v("m"), ex("r"), v("n"))]),
            ),
        );
        assert_eq!(q.form, QueryForm::Select(Projection::Star));
        assert_eq!(q.pattern, expected);
    }

    #[test]
    fn listing_two_nests_optionals_with_true_filters() {
        let q = parse("SELECT * { :x1 :p ?v . OPTIONAL { :x2 :q ?w . OPTIONAL { :x3 :p ?v }}}");
        let expected = GraphPattern::opt(
            GraphPattern::Bgp(vec![t(ex("x1"), ex("p"), v("v"))]),
            GraphPattern::opt(
                GraphPattern::Bgp(vec![t(ex("x2"), ex("q"), v("w"))]),
                GraphPattern::Bgp(vec![t(ex("x3"), ex("p"), v("v"))]),
                FilterExpr::True,
            ),
            FilterExpr::True,
        );
        assert_eq!(q.pattern, expected);
    }

    #[test]
    fn filters_inside_optional_move_to_its_condition() {
        let q = parse("SELECT * { ?a :p ?b OPTIONAL { ?b :q ?c FILTER(?c > 1) FILTER(?c < 5) } }");
        let GraphPattern::Opt(_, inner, r) = &q.pattern else { panic!("{:?}", q.pattern) };
        assert!(matches!(**inner, GraphPattern::Bgp(_)));
        assert!(matches!(r, FilterExpr::And(..)));
    }

    #[test]
    fn ordinary_filters_wrap_exists() {
        let q = parse("SELECT * { ?a :p ?b FILTER(?b = 1) FILTER NOT EXISTS { ?b :q ?a } }");
        let GraphPattern::Filter(inner, _) = &q.pattern else { panic!() };
        assert!(matches!(**inner, GraphPattern::Fne(..)));
    }

    #[test]
    fn union_associates_left() {
        let q = parse("SELECT * { {?a :p 1} UNION {?a :p 2} UNION {?a :p 3} }");
        let GraphPattern::Union(l, _) = &q.pattern else { panic!() };
        assert!(matches!(**l, GraphPattern::Union(..)));
    }

    #[test]
    fn arithmetic_and_precedence() {
        let q = parse("SELECT * { ?a :p ?b FILTER(?a + 1 < ?b || !BOUND(?b) && ?a != 2) }");
        let GraphPattern::Filter(_, FilterExpr::Or(l, r)) = &q.pattern else { panic!() };
        assert!(matches!(**l, FilterExpr::Compare(CompareOp::Lt, FilterAtom::Arith(ArithOp::Add, ..), _)));
        assert!(matches!(**r, FilterExpr::And(..)));
    }

    #[test]
    fn negative_literal_in_filter() {
        let q = parse("SELECT * { ?a :p ?b FILTER(?b > -3) }");
        let GraphPattern::Filter(_, FilterExpr::Compare(_, _, FilterAtom::Term(Term::Literal(l)))) = &q.pattern else {
            panic!()
        };
        assert_eq!(l.lexical, "-3");
    }

    #[test]
    fn unsupported_features_are_classified() {
        for text in [
            "SELECT * { ?a :p ?b } GROUP BY ?a HAVING (?a > 1)",
            "SELECT * { GRAPH :g { ?a :p ?b } }",
            "SELECT * { ?a :p ?b BIND (1 AS ?c) }",
            "SELECT * { ?a :p/:q ?b }",
            "SELECT * { ?a :p ?b FILTER regex(?b, \"x\") }",
            "SELECT * { { SELECT ?a WHERE { ?a :p ?b } } }",
            "SELECT * { _:x :p ?b }",
        ] {
            let err = parse_query(&format!("PREFIX : <{EX}>\n{text}")).unwrap_err();
            assert!(matches!(err, ParseError::Unsupported { .. }), "{text}: {err}");
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_query("SELECT * WHERE {\n  ?a ?b }").unwrap_err();
        assert!(matches!(err, ParseError::Syntax(_)));
        assert_eq!(err.position().0, 2);
    }

    #[test]
    fn reserved_variable_names_are_rejected() {
        assert!(is_reserved_variable("n_rl1"));
        assert!(is_reserved_variable("tmp_3"));
        assert!(is_reserved_variable("__closure"));
        assert!(!is_reserved_variable("rl1"));
        assert!(!is_reserved_variable("tmp"));
        assert!(parse_query("SELECT * { ?x_rl2 <urn:p> ?y }").is_err());
    }

    #[test]
    fn validate_construct_template() {
        let bad = parse("CONSTRUCT {?y a :P} WHERE {?x a :Q}");
        assert_eq!(validate_query(&bad).unwrap_err().to_string(), "unbindable template variable ?y");
        assert!(validate_query(&parse("CONSTRUCT {?x :k _:b} WHERE {?x a :Q}")).is_ok());
        assert!(validate_query(&parse("CONSTRUCT {?x a :Person} WHERE {?x a :Researcher}")).is_ok());
    }
}
