use std::collections::HashMap;

use super::{
    check_blank_label, check_iri, Graph, Literal, Term, Triple, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE,
    XSD_INTEGER,
};
use crate::error::ParseError;
use crate::lexer::{tokenize, Dialect, Tok, Token};

/// Parses the supported Turtle subset: prefix directives, `a`, and `;`/`,`
/// abbreviations. Collections and blank-node property lists are reported as
/// unsupported.
pub fn parse_turtle(text: &str) -> Result<Graph, ParseError> {
    let tokens = tokenize(text, Dialect::Turtle)?;
    let mut p = TurtleParser { tokens: &tokens, pos: 0, prefixes: HashMap::new(), graph: Graph::new() };
    p.document()?;
    Ok(p.graph)
}

struct TurtleParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    prefixes: HashMap<String, String>,
    graph: Graph,
}

impl TurtleParser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<&Token, ParseError> {
        let t = self.tokens.get(self.pos).ok_or_else(|| self.eof())?;
        self.pos += 1;
        Ok(t)
    }

    fn eof(&self) -> ParseError {
        let (line, column) = self.tokens.last().map(|t| (t.line, t.column)).unwrap_or((1, 1));
        ParseError::syntax(line, column, "unexpected end of input")
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
        while let Some(t) = self.peek() {
            match &t.tok {
                Tok::AtWord(w) if w == "prefix" => {
                    self.pos += 1;
                    self.prefix_decl()?;
                    self.expect_punct(".")?;
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("prefix") => {
                    self.pos += 1;
                    self.prefix_decl()?;
                }
                Tok::AtWord(w) | Tok::Word(w) if w.eq_ignore_ascii_case("base") => {
                    return Err(ParseError::unsupported(t.line, t.column, "base IRI declaration"));
                }
                _ => self.triples()?,
            }
        }
        Ok(())
    }

    fn prefix_decl(&mut self) -> Result<(), ParseError> {
        let t = self.next()?.clone();
        let Tok::PName { prefix, local } = &t.tok else {
            return Err(ParseError::syntax(t.line, t.column, "expected prefix name"));
        };
        if !local.is_empty() {
            return Err(ParseError::syntax(t.line, t.column, "prefix declaration must end with ':'"));
        }
        let iri = self.next()?.clone();
        let Tok::Iri(ns) = &iri.tok else {
            return Err(ParseError::syntax(iri.line, iri.column, "expected namespace IRI"));
        };
        self.prefixes.insert(prefix.clone(), ns.clone());
        Ok(())
    }

    fn triples(&mut self) -> Result<(), ParseError> {
        let subject = self.term(Position::Subject)?;
        loop {
            let predicate = self.term(Position::Predicate)?;
            loop {
                let object = self.term(Position::Object)?;
                self.graph.insert(Triple::new(subject.clone(), predicate.clone(), object));
                if self.peek().is_some_and(|t| t.tok.is_punct(",")) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.peek().is_some_and(|t| t.tok.is_punct(";")) {
                self.pos += 1;
                // `;` may be repeated or directly precede the final '.'.
                while self.peek().is_some_and(|t| t.tok.is_punct(";")) {
                    self.pos += 1;
                }
                if self.peek().is_some_and(|t| t.tok.is_punct(".")) {
                    break;
                }
            } else {
                break;
            }
        }
        self.expect_punct(".")
    }

    fn term(&mut self, position: Position) -> Result<Term, ParseError> {
        let t = self.next()?.clone();
        let (line, column) = (t.line, t.column);
        let term = match &t.tok {
            Tok::Iri(i) => {
                check_iri(i).map_err(|m| ParseError::syntax(line, column, m))?;
                Term::Iri(i.clone())
            }
            Tok::PName { prefix, local } => {
                let ns = self
                    .prefixes
                    .get(prefix)
                    .ok_or_else(|| ParseError::syntax(line, column, format!("undeclared prefix '{prefix}:'")))?;
                Term::Iri(format!("{ns}{local}"))
            }
            Tok::Word(w) if w == "a" && position == Position::Predicate => Term::iri(RDF_TYPE),
            Tok::Word(w) if (w == "true" || w == "false") && position == Position::Object => {
                Term::Literal(Literal::typed(w.clone(), XSD_BOOLEAN))
            }
            Tok::Blank(b) => {
                check_blank_label(b, line, column)?;
                Term::BlankNode(b.clone())
            }
            Tok::Str(s) => {
                let lit = match self.peek().map(|t| &t.tok) {
                    Some(Tok::LangTag(l)) => {
                        let l = l.clone();
                        self.pos += 1;
                        Literal::lang_string(s.clone(), l)
                    }
                    Some(Tok::Punct("^^")) => {
                        self.pos += 1;
                        match self.term(Position::Datatype)? {
                            Term::Iri(dt) => Literal::typed(s.clone(), dt),
                            _ => return Err(ParseError::syntax(line, column, "datatype must be an IRI")),
                        }
                    }
                    _ => Literal::string(s.clone()),
                };
                Term::Literal(lit)
            }
            Tok::Integer(n) => Term::Literal(Literal::typed(n.trim_start_matches('+'), XSD_INTEGER)),
            Tok::Decimal(n) => Term::Literal(Literal::typed(n.trim_start_matches('+'), XSD_DECIMAL)),
            Tok::Double(n) => Term::Literal(Literal::typed(n.trim_start_matches('+'), XSD_DOUBLE)),
            Tok::Punct("(") => return Err(ParseError::unsupported(line, column, "collection")),
            Tok::Punct("[") => return Err(ParseError::unsupported(line, column, "blank node property list")),
            Tok::Var(v) => return Err(ParseError::syntax(line, column, format!("variable ?{v} in a data graph"))),
            other => {
                return Err(ParseError::syntax(line, column, format!("unexpected {}", other.describe())));
            }
        };
        let ok = match position {
            Position::Subject => matches!(term, Term::Iri(_) | Term::BlankNode(_)),
            Position::Predicate | Position::Datatype => term.is_iri(),
            Position::Object => true,
        };
        if !ok {
            return Err(ParseError::syntax(line, column, format!("{} not allowed as {position:?}", t.tok.describe())));
        }
        Ok(term)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Position {
    Subject,
    Predicate,
    Object,
    Datatype,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(local: &str) -> Term {
        Term::iri(format!("urn:x#{local}"))
    }

    #[test]
    fn researcher_triple() {
        let g = parse_turtle("@prefix : <urn:x#>. :John a :Researcher .").unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.contains(&Triple::new(x("John"), Term::iri(RDF_TYPE), x("Researcher"))));
    }

    #[test]
    fn predicate_list_shares_subject() {
        let g = parse_turtle("@prefix : <urn:x#>. :s :p :o ; :q :a .").unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.contains(&Triple::new(x("s"), x("q"), x("a"))));
    }

    #[test]
    fn object_list_with_integers() {
        let g = parse_turtle("@prefix : <urn:x#>. :s :p 1, 2 .").unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.contains(&Triple::new(x("s"), x("p"), Term::integer(2))));
    }

    #[test]
    fn sparql_style_prefix() {
        let g = parse_turtle("PREFIX ex: <urn:x#>\nex:s ex:p ex:o .").unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn collections_are_unsupported_not_syntax_errors() {
        let err = parse_turtle("@prefix : <urn:x#>. :s :p (1 2) .").unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { .. }));
        let err = parse_turtle("@prefix : <urn:x#>. :s :p [ :q 1 ] .").unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { .. }));
    }

    #[test]
    fn undeclared_prefix_is_syntax_error_with_position() {
        let err = parse_turtle("\n  :s :p :o .").unwrap_err();
        assert_eq!(err.position(), (2, 3));
        assert!(matches!(err, ParseError::Syntax(_)));
    }
}
