use std::collections::HashMap;
use std::fmt::Write;

use super::vocab::{LOG_IMPLIES, STANDARD_PREFIXES};
use super::{Mode, N3Doc, N3Gp, N3Rule, N3Term, N3Triple};
use crate::error::ParseError;
use crate::lexer::{tokenize, Dialect, Tok, Token};
use crate::rdf::{
    check_blank_label, check_iri, escape_string, Literal, Term, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE,
    XSD_INTEGER, XSD_STRING,
};

/// Writes a document: the prefix block, then facts, then rules, one
/// statement per line.
pub fn serialize_n3(doc: &N3Doc) -> String {
    let mut prefixes = standard_prefixes();
    for (p, n) in &doc.prefixes {
        if !prefixes.iter().any(|(q, _)| q == p) && valid_prefix(p) {
            prefixes.push((p.clone(), n.clone()));
        }
    }
    let w = Writer { prefixes: &prefixes };
    let mut out = String::new();
    for (p, n) in &prefixes {
        let _ = writeln!(out, "@prefix {p}: <{n}>.");
    }
    for t in &doc.facts {
        out.push_str(&w.triple(t));
        out.push('\n');
    }
    for r in &doc.rules {
        let (left, arrow, right) = match r.mode {
            Mode::Forward => (&r.premise, "=>", &r.conclusion),
            Mode::Backward => (&r.conclusion, "<=", &r.premise),
        };
        let _ = writeln!(out, "{} {arrow} {}.", w.graph(left), w.graph(right));
    }
    out
}

fn valid_prefix(p: &str) -> bool {
    p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        && !p.starts_with(['_', '-'])
        && !p.chars().next().is_some_and(|c| c.is_ascii_digit())
}

fn valid_local(l: &str) -> bool {
    l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') && !l.starts_with('-')
}

struct Writer<'a> {
    prefixes: &'a [(String, String)],
}

impl Writer<'_> {
    fn triple(&self, t: &N3Triple) -> String {
        let p = match &t.predicate {
            N3Term::Atomic(Term::Iri(i)) if i == RDF_TYPE => "a".to_owned(),
            other => self.term(other),
        };
        format!("{} {p} {}.", self.term(&t.subject), self.term(&t.object))
    }

    fn graph(&self, g: &N3Gp) -> String {
        let body: Vec<String> = g.iter().map(|t| self.triple(t)).collect();
        format!("{{{}}}", body.join(" "))
    }

    fn term(&self, t: &N3Term) -> String {
        match t {
            N3Term::Atomic(a) => self.atom(a),
            N3Term::Graph(g) => self.graph(g),
            N3Term::List(items) => {
                let parts: Vec<String> = items.iter().map(|i| self.term(i)).collect();
                format!("({})", parts.join(" "))
            }
        }
    }

    fn iri(&self, iri: &str) -> String {
        let best = self
            .prefixes
            .iter()
            .filter(|(_, ns)| iri.starts_with(ns.as_str()) && valid_local(&iri[ns.len()..]))
            .max_by_key(|(_, ns)| ns.len());
        match best {
            Some((p, ns)) => format!("{p}:{}", &iri[ns.len()..]),
            None => format!("<{iri}>"),
        }
    }

    fn atom(&self, t: &Term) -> String {
        match t {
            Term::Iri(i) => self.iri(i),
            Term::BlankNode(b) => format!("_:{b}"),
            Term::Variable(v) => format!("?{}", v.name()),
            Term::Literal(l) => {
                if l.datatype == XSD_INTEGER && is_plain_integer(&l.lexical) {
                    return l.lexical.clone();
                }
                let mut s = format!("\"{}\"", escape_string(&l.lexical));
                if let Some(lang) = &l.lang {
                    s.push('@');
                    s.push_str(lang);
                } else if l.datatype != XSD_STRING {
                    s.push_str("^^");
                    s.push_str(&self.iri(&l.datatype));
                }
                s
            }
        }
    }
}

fn standard_prefixes() -> Vec<(String, String)> {
    STANDARD_PREFIXES.iter().map(|(p, n)| ((*p).to_owned(), (*n).to_owned())).collect()
}

impl std::fmt::Display for N3Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let prefixes = standard_prefixes();
        f.write_str(&Writer { prefixes: &prefixes }.term(self))
    }
}

impl std::fmt::Display for N3Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let prefixes = standard_prefixes();
        f.write_str(&Writer { prefixes: &prefixes }.triple(self))
    }
}

impl std::fmt::Display for N3Gp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let prefixes = standard_prefixes();
        f.write_str(&Writer { prefixes: &prefixes }.graph(self))
    }
}

fn is_plain_integer(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Parses the N3 subset: prefix directives, facts, `=>`/`<=` rules, graph
/// terms, lists and quickvars.
pub fn parse_n3(text: &str) -> Result<N3Doc, ParseError> {
    let tokens = tokenize(text, Dialect::N3)?;
    let mut p = N3Parser { tokens: &tokens, pos: 0, prefixes: HashMap::new(), doc: N3Doc::new() };
    p.document()?;
    Ok(p.doc)
}

struct N3Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    prefixes: HashMap<String, String>,
    doc: N3Doc,
}

impl<'a> N3Parser<'a> {
    fn peek_tok(&self) -> Option<&'a Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Result<&'a Token, ParseError> {
        let t = self.tokens.get(self.pos).ok_or_else(|| {
            let (line, column) = self.tokens.last().map(|t| (t.line, t.column)).unwrap_or((1, 1));
            ParseError::syntax(line, column, "unexpected end of input")
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek_tok().is_some_and(|t| t.is_punct(p))
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        let t = self.next()?;
        if t.tok.is_punct(p) {
            Ok(())
        } else {
            Err(ParseError::syntax(t.line, t.column, format!("expected '{p}', found {}", t.tok.describe())))
        }
    }

    fn document(&mut self) -> Result<(), ParseError> {
        while let Some(tok) = self.peek_tok() {
            let t = &self.tokens[self.pos];
            match tok {
                Tok::AtWord(w) if w == "prefix" => {
                    self.pos += 1;
                    self.prefix_decl()?;
                    self.expect_punct(".")?;
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("prefix") => {
                    self.pos += 1;
                    self.prefix_decl()?;
                }
                Tok::AtWord(w) => {
                    return Err(ParseError::unsupported(t.line, t.column, format!("@{w}")));
                }
                _ => self.statement()?,
            }
        }
        Ok(())
    }

    fn prefix_decl(&mut self) -> Result<(), ParseError> {
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
        if !STANDARD_PREFIXES.iter().any(|(p, n)| p == prefix && n == ns) {
            self.doc.add_prefix(prefix, ns);
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let start = &self.tokens[self.pos];
        let subject = self.term()?;
        let arrow = match self.peek_tok() {
            Some(Tok::Punct("=>")) => Some(Mode::Forward),
            Some(Tok::Punct("<=")) => Some(Mode::Backward),
            _ => None,
        };
        if let Some(mode) = arrow {
            self.pos += 1;
            let object = self.term()?;
            self.expect_punct(".")?;
            return self.push_rule(subject, mode, object, start);
        }
        let mut triples = Vec::new();
        self.predicate_object_list(subject, &mut triples)?;
        self.expect_punct(".")?;
        for t in triples {
            if t.predicate_iri() == Some(LOG_IMPLIES) {
                self.push_rule(t.subject, Mode::Forward, t.object, start)?;
            } else {
                self.doc.facts.insert(t);
            }
        }
        Ok(())
    }

    fn push_rule(&mut self, left: N3Term, mode: Mode, right: N3Term, at: &Token) -> Result<(), ParseError> {
        let (N3Term::Graph(l), N3Term::Graph(r)) = (left, right) else {
            return Err(ParseError::syntax(at.line, at.column, "rule sides must be graph terms"));
        };
        let rule = match mode {
            Mode::Forward => N3Rule::forward(l, r),
            Mode::Backward => N3Rule::backward(r, l),
        };
        self.doc.rules.push(rule);
        Ok(())
    }

    fn predicate_object_list(&mut self, subject: N3Term, out: &mut Vec<N3Triple>) -> Result<(), ParseError> {
        loop {
            let predicate = self.verb()?;
            loop {
                let object = self.term()?;
                out.push(N3Triple { subject: subject.clone(), predicate: predicate.clone(), object });
                if !self.at_punct(",") {
                    break;
                }
                self.pos += 1;
            }
            if !self.at_punct(";") {
                return Ok(());
            }
            while self.at_punct(";") {
                self.pos += 1;
            }
            if matches!(self.peek_tok(), Some(Tok::Punct("." | "}")) | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<N3Term, ParseError> {
        if let Some(Tok::Word(w)) = self.peek_tok() {
            if w == "a" {
                self.pos += 1;
                return Ok(N3Term::iri(RDF_TYPE));
            }
        }
        if let Some(Tok::Punct(p @ ("=" | "=>" | "<="))) = self.peek_tok() {
            let t = &self.tokens[self.pos];
            return Err(ParseError::unsupported(t.line, t.column, format!("'{p}' in predicate position")));
        }
        self.term()
    }

    fn term(&mut self) -> Result<N3Term, ParseError> {
        let t = self.next()?;
        let (line, column) = (t.line, t.column);
        let term = match &t.tok {
            Tok::Iri(i) => {
                check_iri(i).map_err(|m| ParseError::syntax(line, column, m))?;
                Term::iri(i.clone())
            }
            Tok::PName { .. } => self.pname(t)?,
            Tok::Var(v) => Term::var(v.clone()),
            Tok::Blank(b) => {
                check_blank_label(b, line, column)?;
                Term::blank(b.clone())
            }
            Tok::Str(s) => {
                let lit = match self.peek_tok() {
                    Some(Tok::LangTag(l)) => {
                        self.pos += 1;
                        Literal::lang_string(s.clone(), l.clone())
                    }
                    Some(Tok::Punct("^^")) => {
                        self.pos += 1;
                        let dt = self.next()?;
                        let dt = match &dt.tok {
                            Tok::Iri(i) => i.clone(),
                            Tok::PName { .. } => match self.pname(dt)? {
                                Term::Iri(i) => i,
                                _ => unreachable!(),
                            },
                            _ => return Err(ParseError::syntax(dt.line, dt.column, "expected datatype IRI")),
                        };
                        Literal::typed(s.clone(), dt)
                    }
                    _ => Literal::string(s.clone()),
                };
                Term::Literal(lit)
            }
            Tok::Integer(n) => Term::Literal(Literal::typed(n.trim_start_matches('+'), XSD_INTEGER)),
            Tok::Decimal(n) => Term::Literal(Literal::typed(n.trim_start_matches('+'), XSD_DECIMAL)),
            Tok::Double(n) => Term::Literal(Literal::typed(n.trim_start_matches('+'), XSD_DOUBLE)),
            Tok::Word(w) if w == "true" || w == "false" => Term::Literal(Literal::typed(w.clone(), XSD_BOOLEAN)),
            Tok::Punct("{") => {
                let mut g = N3Gp::new();
                loop {
                    if self.at_punct("}") {
                        self.pos += 1;
                        break;
                    }
                    let s = self.term()?;
                    let mut ts = Vec::new();
                    self.predicate_object_list(s, &mut ts)?;
                    g.extend(ts);
                    if self.at_punct(".") {
                        self.pos += 1;
                    } else if !self.at_punct("}") {
                        let t = self.next()?;
                        return Err(ParseError::syntax(
                            t.line,
                            t.column,
                            format!("expected '.' or '}}', found {}", t.tok.describe()),
                        ));
                    }
                }
                return Ok(N3Term::Graph(g));
            }
            Tok::Punct("(") => {
                let mut items = Vec::new();
                while !self.at_punct(")") {
                    items.push(self.term()?);
                }
                self.pos += 1;
                return Ok(N3Term::List(items));
            }
            Tok::Punct("[") => return Err(ParseError::unsupported(line, column, "blank node property list")),
            Tok::Punct(p @ ("!" | "^")) => return Err(ParseError::unsupported(line, column, format!("path '{p}'"))),
            other => return Err(ParseError::syntax(line, column, format!("unexpected {}", other.describe()))),
        };
        Ok(N3Term::Atomic(term))
    }

    fn pname(&self, t: &Token) -> Result<Term, ParseError> {
        let Tok::PName { prefix, local } = &t.tok else { unreachable!() };
        let ns = self
            .prefixes
            .get(prefix)
            .ok_or_else(|| ParseError::syntax(t.line, t.column, format!("undeclared prefix '{prefix}:'")))?;
        Ok(Term::iri(format!("{ns}{local}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_four_text() {
        let premise: N3Gp =
            [N3Triple::new(Term::var("x"), Term::iri(RDF_TYPE), Term::iri("urn:x#Researcher"))].into_iter().collect();
        let conclusion: N3Gp =
            [N3Triple::new(Term::var("x"), Term::iri(RDF_TYPE), Term::iri("urn:x#Person"))].into_iter().collect();
        let mut doc = N3Doc::new().with_prefix("", "urn:x#");
        doc.rules.push(N3Rule::forward(premise, conclusion));
        let text = serialize_n3(&doc);
        assert!(text.ends_with("{?x a :Researcher.} => {?x a :Person.}.\n"), "{text}");
        assert_eq!(parse_n3(&text).unwrap(), doc);
    }

    #[test]
    fn empty_document_is_prefix_block_only() {
        let text = serialize_n3(&N3Doc::new());
        assert!(text.lines().all(|l| l.starts_with("@prefix")));
        assert_eq!(text.lines().count(), STANDARD_PREFIXES.len());
    }

    #[test]
    fn backward_rule_direction() {
        let doc = parse_n3("@prefix : <urn:x#>. {?x :p ?y.} <= {?x :q ?y.}.").unwrap();
        assert_eq!(doc.rules.len(), 1);
        let r = &doc.rules[0];
        assert_eq!(r.mode, Mode::Backward);
        assert_eq!(r.conclusion.iter().next().unwrap().predicate_iri(), Some("urn:x#p"));
    }

    #[test]
    fn single_fact() {
        let doc = parse_n3("@prefix : <urn:x#>. :a :b :c.").unwrap();
        assert_eq!(doc.facts.len(), 1);
        assert!(doc.rules.is_empty());
    }

    #[test]
    fn nested_graphs_lists_and_literals() {
        let text = "@prefix : <urn:x#>.\n{?x :p ?n. ?__closure <urn:y> {?x :q (1 -2 \"a\\\"b\"@en \"1.5\"^^<http://www.w3.org/2001/XMLSchema#decimal>)}.} => {_:b :r ((\"x\" ?x) ()).}.";
        let doc = parse_n3(text).unwrap();
        let again = parse_n3(&serialize_n3(&doc)).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn unsupported_and_syntax_errors() {
        assert!(matches!(parse_n3("@forAll :x."), Err(ParseError::Unsupported { .. })));
        assert!(matches!(parse_n3("@prefix : <urn:x#>. :a :b [ :c :d ]."), Err(ParseError::Unsupported { .. })));
        assert!(matches!(parse_n3("@prefix : <urn:x#>. :a :b"), Err(ParseError::Syntax(_))));
        assert!(matches!(parse_n3(":a :b :c."), Err(ParseError::Syntax(_))));
    }
}
