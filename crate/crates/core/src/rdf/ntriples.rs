use super::{check_blank_label, check_iri, Graph, Literal, Term, Triple};
use crate::error::{Error, ParseError};
use crate::lexer::{tokenize, Dialect, Tok, Token};

/// Parses line-oriented N-Triples. Duplicate lines collapse.
pub fn parse_ntriples(text: &str) -> Result<Graph, ParseError> {
    let mut graph = Graph::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let tokens = tokenize(line, Dialect::Turtle).map_err(|e| relocate(e, line_no))?;
        if tokens.is_empty() {
            continue;
        }
        graph.insert(parse_line(&tokens, line_no)?);
    }
    Ok(graph)
}

fn relocate(e: ParseError, line: usize) -> ParseError {
    match e {
        ParseError::Syntax(mut s) => {
            s.line = line;
            ParseError::Syntax(s)
        }
        ParseError::Unsupported { column, feature, .. } => ParseError::Unsupported { line, column, feature },
    }
}

fn parse_line(tokens: &[Token], line: usize) -> Result<Triple, ParseError> {
    let mut it = tokens.iter().peekable();
    let mut next_term = |pos: &str| -> Result<Term, ParseError> {
        let tok = it.next().ok_or_else(|| ParseError::syntax(line, 1, format!("missing {pos}")))?;
        let col = tok.column;
        match &tok.tok {
            Tok::Iri(i) => {
                check_iri(i).map_err(|m| ParseError::syntax(line, col, m))?;
                Ok(Term::Iri(i.clone()))
            }
            Tok::Blank(b) => {
                check_blank_label(b, line, col)?;
                Ok(Term::BlankNode(b.clone()))
            }
            Tok::Str(s) => {
                let lit = match it.peek().map(|t| &t.tok) {
                    Some(Tok::LangTag(l)) => {
                        let l = l.clone();
                        it.next();
                        Literal::lang_string(s.clone(), l)
                    }
                    Some(Tok::Punct("^^")) => {
                        it.next();
                        match it.next().map(|t| &t.tok) {
                            Some(Tok::Iri(dt)) => Literal::typed(s.clone(), dt.clone()),
                            _ => return Err(ParseError::syntax(line, col, "expected datatype IRI after ^^")),
                        }
                    }
                    _ => Literal::string(s.clone()),
                };
                Ok(Term::Literal(lit))
            }
            Tok::Var(v) => Err(ParseError::syntax(line, col, format!("variable ?{v} in a data graph"))),
            other => Err(ParseError::syntax(line, col, format!("unexpected {} as {pos}", other.describe()))),
        }
    };
    let subject = next_term("subject")?;
    let predicate = next_term("predicate")?;
    let object = next_term("object")?;
    if matches!(subject, Term::Literal(_)) {
        return Err(ParseError::syntax(line, tokens[0].column, "literal in subject position"));
    }
    if !predicate.is_iri() {
        return Err(ParseError::syntax(line, tokens[1].column, "predicate must be an IRI"));
    }
    match it.next() {
        Some(t) if t.tok.is_punct(".") => {}
        Some(t) => return Err(ParseError::syntax(line, t.column, format!("expected '.', found {}", t.tok.describe()))),
        None => return Err(ParseError::syntax(line, 1, "missing terminating '.'")),
    }
    if let Some(t) = it.next() {
        return Err(ParseError::syntax(line, t.column, format!("trailing {}", t.tok.describe())));
    }
    Ok(Triple::new(subject, predicate, object))
}

/// Writes one triple per line in canonical term order.
pub fn serialize_ntriples(graph: &Graph) -> Result<String, Error> {
    let mut out = String::new();
    for t in graph {
        if !t.is_ground() {
            return Err(Error::Serialize(format!("variable in triple {t}")));
        }
        if !t.is_well_formed() {
            return Err(Error::Serialize(format!("not an RDF triple: {t}")));
        }
        out.push_str(&t.to_string());
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_triple() {
        let g = parse_ntriples("<urn:s> <urn:p> <urn:o> .").unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.contains(&Triple::new(Term::iri("urn:s"), Term::iri("urn:p"), Term::iri("urn:o"))));
    }

    #[test]
    fn empty_input_is_empty_graph() {
        assert!(parse_ntriples("").unwrap().is_empty());
        assert!(parse_ntriples("# comment only\n\n").unwrap().is_empty());
    }

    #[test]
    fn duplicate_lines_collapse() {
        let g = parse_ntriples("<urn:s> <urn:p> <urn:o> .\n<urn:s> <urn:p> <urn:o> .\n").unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_ntriples("<urn:s> <urn:p> <urn:o> .\n<urn:s> <urn:p> .\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax(ref s) if s.line == 2), "{err}");
    }

    #[test]
    fn variables_are_rejected() {
        let err = parse_ntriples("?x <urn:p> <urn:o> .").unwrap_err();
        assert!(err.to_string().contains("variable"));
    }

    #[test]
    fn reserved_blank_prefix_is_rejected() {
        assert!(parse_ntriples("_:ub_0 <urn:p> <urn:o> .").is_err());
    }

    #[test]
    fn literals_with_lang_and_datatype() {
        let g = parse_ntriples(
            "<urn:s> <urn:p> \"chat\"@fr .\n<urn:s> <urn:p> \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n",
        )
        .unwrap();
        assert!(g.contains(&Triple::new(Term::iri("urn:s"), Term::iri("urn:p"), Term::integer(1))));
        assert!(g.contains(&Triple::new(
            Term::iri("urn:s"),
            Term::iri("urn:p"),
            Term::Literal(Literal::lang_string("chat", "fr"))
        )));
    }

    #[test]
    fn serialize_empty_and_single() {
        assert_eq!(serialize_ntriples(&Graph::new()).unwrap(), "");
        let g = parse_ntriples("<urn:s> <urn:p> \"x\" .").unwrap();
        assert_eq!(serialize_ntriples(&g).unwrap(), "<urn:s> <urn:p> \"x\" .\n");
    }

    #[test]
    fn serialize_rejects_variables() {
        let g: Graph = [Triple::new(Term::var("x"), Term::iri("urn:p"), Term::iri("urn:o"))].into_iter().collect();
        assert!(serialize_ntriples(&g).is_err());
    }

    pub(crate) fn arb_term_object() -> impl Strategy<Value = Term> {
        prop_oneof![
            "[a-z]{1,6}".prop_map(|s| Term::iri(format!("urn:x:{s}"))),
            "[a-z][a-z0-9]{0,4}".prop_map(Term::blank),
            any::<i32>().prop_map(|n| Term::integer(n as i64)),
            "[ -~\\n\\t\"\\\\é]{0,8}".prop_map(Term::string),
            ("[a-z]{0,5}", "[a-z]{2}").prop_map(|(s, l)| Term::Literal(Literal::lang_string(s, l))),
        ]
    }

    proptest! {
        #[test]
        fn round_trip(triples in proptest::collection::vec(
            (prop_oneof!["[a-z]{1,4}".prop_map(|s| Term::iri(format!("urn:s:{s}"))), "[a-z]{1,4}".prop_map(Term::blank)],
             "[a-z]{1,3}".prop_map(|s| Term::iri(format!("urn:p:{s}"))),
             arb_term_object()), 0..12)) {
            let g: Graph = triples.into_iter().map(|(s, p, o)| Triple::new(s, p, o)).collect();
            let text = serialize_ntriples(&g).unwrap();
            prop_assert_eq!(parse_ntriples(&text).unwrap(), g);
        }
    }
}
