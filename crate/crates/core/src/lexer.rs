//! Tokenizer shared by the Turtle, N3 and SPARQL readers.

use crate::error::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Dialect {
    Turtle,
    N3,
    Sparql,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Iri(String),
    PName {
        prefix: String,
        local: String,
    },
    Var(String),
    Blank(String),
    Str(String),
    LangTag(String),
    Integer(String),
    Decimal(String),
    Double(String),
    /// Bare word: keywords, `a`, `true`, `false`, function names.
    Word(String),
    /// `@prefix`, `@base`, `@forAll`, ...
    AtWord(String),
    Punct(&'static str),
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Iri(i) => format!("<{i}>"),
            Tok::PName { prefix, local } => format!("{prefix}:{local}"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Blank(b) => format!("_:{b}"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::LangTag(l) => format!("@{l}"),
            Tok::Integer(n) | Tok::Decimal(n) | Tok::Double(n) => n.clone(),
            Tok::Word(w) => w.clone(),
            Tok::AtWord(w) => format!("@{w}"),
            Tok::Punct(p) => (*p).to_owned(),
        }
    }

    pub(crate) fn is_punct(&self, p: &str) -> bool {
        matches!(self, Tok::Punct(q) if *q == p)
    }

    pub(crate) fn is_word(&self, w: &str) -> bool {
        matches!(self, Tok::Word(x) if x.eq_ignore_ascii_case(w))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str, dialect: Dialect) -> Result<Vec<Token>, ParseError> {
    Lexer { chars: text.chars().collect(), pos: 0, line: 1, column: 1, dialect, out: Vec::new() }.run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    dialect: Dialect,
    out: Vec<Token>,
}

const PUNCT2: &[&str] = &["=>", "<=", ">=", "!=", "&&", "||", "^^"];
const PUNCT1: &[&str] =
    &["{", "}", "(", ")", "[", "]", ".", ";", ",", "=", "<", ">", "!", "+", "-", "*", "/", "^", "|"];

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, column: usize, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(line, column, msg)
    }

    fn push(&mut self, tok: Tok, line: usize, column: usize) {
        self.out.push(Token { tok, line, column });
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        while let Some(c) = self.peek(0) {
            let (line, column) = (self.line, self.column);
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '#' {
                while let Some(c) = self.peek(0) {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            match c {
                '<' => self.lex_angle(line, column)?,
                '"' | '\'' => {
                    let s = self.lex_string(line, column)?;
                    self.push(Tok::Str(s), line, column);
                    if self.peek(0) == Some('@') {
                        self.bump();
                        let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                        if tag.is_empty() {
                            return Err(self.err(line, column, "empty language tag"));
                        }
                        self.push(Tok::LangTag(tag), line, column);
                    }
                }
                '?' | '$' if self.peek(1).is_some_and(is_name_char) => {
                    self.bump();
                    let name = self.take_while(is_name_char);
                    self.push(Tok::Var(name), line, column);
                }
                '_' if self.peek(1) == Some(':') => {
                    self.bump();
                    self.bump();
                    let label = self.take_local();
                    if label.is_empty() {
                        return Err(self.err(line, column, "empty blank node label"));
                    }
                    self.push(Tok::Blank(label), line, column);
                }
                '@' => {
                    self.bump();
                    let w = self.take_while(|c| c.is_ascii_alphabetic());
                    if w.is_empty() {
                        return Err(self.err(line, column, "stray '@'"));
                    }
                    self.push(Tok::AtWord(w), line, column);
                }
                c if c.is_ascii_digit() => self.lex_number(line, column, String::new())?,
                '+' | '-' if self.dialect != Dialect::Sparql && self.peek(1).is_some_and(|d| d.is_ascii_digit()) => {
                    let sign = self.bump().unwrap().to_string();
                    self.lex_number(line, column, sign)?;
                }
                '.' if self.peek(1).is_some_and(|d| d.is_ascii_digit()) => {
                    self.lex_number(line, column, String::new())?
                }
                c if c.is_alphabetic() || c == '_' || c == ':' => self.lex_word(line, column)?,
                _ => {
                    let rest: String = self.chars[self.pos..self.chars.len().min(self.pos + 3)].iter().collect();
                    let p = PUNCT2
                        .iter()
                        .chain(PUNCT1)
                        .find(|p| rest.starts_with(*p))
                        .copied()
                        .ok_or_else(|| self.err(line, column, format!("unexpected character {c:?}")))?;
                    for _ in 0..p.chars().count() {
                        self.bump();
                    }
                    self.push(Tok::Punct(p), line, column);
                }
            }
        }
        Ok(self.out)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0) {
            if !f(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    /// Local part of a prefixed name or blank label; a trailing '.' is left
    /// for the statement terminator.
    fn take_local(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0) {
            let inner_dot = c == '.' && self.peek(1).is_some_and(|n| is_name_char(n) || n == '-');
            if is_name_char(c) || c == '-' || inner_dot {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn lex_angle(&mut self, line: usize, column: usize) -> Result<(), ParseError> {
        if self.dialect == Dialect::N3 && self.peek(1) == Some('=') {
            self.bump();
            self.bump();
            self.push(Tok::Punct("<="), line, column);
            return Ok(());
        }
        // Scan for an IRI reference; in SPARQL, fall back to an operator.
        let mut end = None;
        let mut i = self.pos + 1;
        while let Some(&c) = self.chars.get(i) {
            if c == '>' {
                end = Some(i);
                break;
            }
            if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
                break;
            }
            i += 1;
        }
        let operator_like = self.dialect == Dialect::Sparql
            && self.peek(1).is_some_and(|c| matches!(c, '=' | '?' | '$') || c.is_ascii_digit());
        match end {
            Some(_) if operator_like => self.lex_operator(line, column),
            Some(end) => {
                self.bump();
                let iri: String = self.chars[self.pos..end].iter().collect();
                while self.pos <= end {
                    self.bump();
                }
                self.push(Tok::Iri(iri), line, column);
                Ok(())
            }
            _ if self.dialect == Dialect::Sparql => self.lex_operator(line, column),
            _ => Err(self.err(line, column, "unterminated IRI reference")),
        }
    }

    fn lex_operator(&mut self, line: usize, column: usize) -> Result<(), ParseError> {
        self.bump();
        if self.peek(0) == Some('=') {
            self.bump();
            self.push(Tok::Punct("<="), line, column);
        } else {
            self.push(Tok::Punct("<"), line, column);
        }
        Ok(())
    }

    fn lex_string(&mut self, line: usize, column: usize) -> Result<String, ParseError> {
        let quote = self.bump().unwrap();
        let long = self.peek(0) == Some(quote) && self.peek(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        } else if self.peek(0) == Some(quote) {
            self.bump();
            return Ok(String::new());
        }
        let mut s = String::new();
        loop {
            let c = self.bump().ok_or_else(|| self.err(line, column, "unterminated string literal"))?;
            if c == quote {
                if !long {
                    return Ok(s);
                }
                if self.peek(0) == Some(quote) && self.peek(1) == Some(quote) {
                    self.bump();
                    self.bump();
                    return Ok(s);
                }
                s.push(c);
                continue;
            }
            if c == '\n' && !long {
                return Err(self.err(line, column, "newline in string literal"));
            }
            if c != '\\' {
                s.push(c);
                continue;
            }
            let e = self.bump().ok_or_else(|| self.err(line, column, "unterminated escape"))?;
            match e {
                't' => s.push('\t'),
                'n' => s.push('\n'),
                'r' => s.push('\r'),
                'b' => s.push('\u{8}'),
                'f' => s.push('\u{c}'),
                '"' => s.push('"'),
                '\'' => s.push('\''),
                '\\' => s.push('\\'),
                'u' | 'U' => {
                    let n = if e == 'u' { 4 } else { 8 };
                    let hex: String = (0..n).filter_map(|_| self.bump()).collect();
                    let ch = u32::from_str_radix(&hex, 16)
                        .ok()
                        .and_then(char::from_u32)
                        .ok_or_else(|| self.err(self.line, self.column, format!("bad unicode escape \\{e}{hex}")))?;
                    s.push(ch);
                }
                other => return Err(self.err(self.line, self.column, format!("unknown escape \\{other}"))),
            }
        }
    }

    fn lex_number(&mut self, line: usize, column: usize, mut text: String) -> Result<(), ParseError> {
        text.push_str(&self.take_while(|c| c.is_ascii_digit()));
        let mut kind = 0; // 0 integer, 1 decimal, 2 double
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            text.push('.');
            text.push_str(&self.take_while(|c| c.is_ascii_digit()));
            kind = 1;
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let sign = matches!(self.peek(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                text.push(self.bump().unwrap());
                if sign {
                    text.push(self.bump().unwrap());
                }
                text.push_str(&self.take_while(|c| c.is_ascii_digit()));
                kind = 2;
            }
        }
        if text.trim_start_matches(['+', '-']).is_empty() {
            return Err(self.err(line, column, "malformed number"));
        }
        let tok = match kind {
            0 => Tok::Integer(text),
            1 => Tok::Decimal(text),
            _ => Tok::Double(text),
        };
        self.push(tok, line, column);
        Ok(())
    }

    fn lex_word(&mut self, line: usize, column: usize) -> Result<(), ParseError> {
        let head = if self.peek(0) == Some(':') {
            String::new()
        } else {
            self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-')
        };
        if self.peek(0) == Some(':') {
            self.bump();
            let local = self.take_local();
            self.push(Tok::PName { prefix: head, local }, line, column);
        } else {
            self.push(Tok::Word(head), line, column);
        }
        Ok(())
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str, d: Dialect) -> Vec<Tok> {
        tokenize(text, d).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn statement_dot_is_not_part_of_number_or_name() {
        assert_eq!(
            kinds(":s :p 1.", Dialect::Turtle),
            vec![
                Tok::PName { prefix: "".into(), local: "s".into() },
                Tok::PName { prefix: "".into(), local: "p".into() },
                Tok::Integer("1".into()),
                Tok::Punct("."),
            ]
        );
    }

    #[test]
    fn sparql_distinguishes_iri_from_less_than() {
        assert_eq!(
            kinds("?m < ?n <urn:x> ?a <= 2", Dialect::Sparql),
            vec![
                Tok::Var("m".into()),
                Tok::Punct("<"),
                Tok::Var("n".into()),
                Tok::Iri("urn:x".into()),
                Tok::Var("a".into()),
                Tok::Punct("<="),
                Tok::Integer("2".into()),
            ]
        );
        assert_eq!(kinds("?m<?n", Dialect::Sparql)[1], Tok::Punct("<"));
    }

    #[test]
    fn n3_arrows() {
        assert_eq!(kinds("} => {", Dialect::N3)[1], Tok::Punct("=>"));
        assert_eq!(kinds("} <= {", Dialect::N3)[1], Tok::Punct("<="));
    }

    #[test]
    fn strings_with_lang_and_escapes() {
        assert_eq!(kinds(r#""a\"b"@en"#, Dialect::Turtle), vec![Tok::Str("a\"b".into()), Tok::LangTag("en".into())]);
    }

    #[test]
    fn unterminated_string_reports_position() {
        let err = tokenize("\n  \"abc", Dialect::Turtle).unwrap_err();
        assert_eq!(err.position(), (2, 3));
    }
}
