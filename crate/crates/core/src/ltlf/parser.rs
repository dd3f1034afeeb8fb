//! Surface-syntax parser.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! formula := binary
//! binary  := unary (("U"|"R"|"&&"|"&"|"||"|"|"|"->"|"<->") unary)*
//! unary   := ("!"|"X"|"N"|"F"|"G") unary | atom
//! atom    := "true" | "tt" | "false" | "ff" | ident | "(" formula ")"
//! ```
//!
//! Precedence: `(!,X,N,F,G) > U = R > && > || > -> > <->`, with `U`, `R`
//! and `->` right-associative. `X` is strong next, `N` weak next.

use thiserror::Error;

use super::alphabet::Alphabet;
use super::ast::Expr;
use super::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    WeakNext,
    Eventually,
    Globally,
    Until,
    Release,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::True => "'true'".into(),
            Tok::False => "'false'".into(),
            Tok::Not => "'!'".into(),
            Tok::And => "'&&'".into(),
            Tok::Or => "'||'".into(),
            Tok::Implies => "'->'".into(),
            Tok::Iff => "'<->'".into(),
            Tok::Next => "'X'".into(),
            Tok::WeakNext => "'N'".into(),
            Tok::Eventually => "'F'".into(),
            Tok::Globally => "'G'".into(),
            Tok::Until => "'U'".into(),
            Tok::Release => "'R'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let Some(&c) = self.chars.peek() else {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            };
            let tok = match c {
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                '!' => {
                    self.bump();
                    Tok::Not
                }
                '&' => {
                    self.bump();
                    if self.chars.peek() == Some(&'&') {
                        self.bump();
                    }
                    Tok::And
                }
                '|' => {
                    self.bump();
                    if self.chars.peek() == Some(&'|') {
                        self.bump();
                    }
                    Tok::Or
                }
                '-' => {
                    self.bump();
                    if self.bump() != Some('>') {
                        return Err(self.error("unknown token '-'"));
                    }
                    Tok::Implies
                }
                '<' => {
                    self.bump();
                    if self.bump() != Some('-') || self.bump() != Some('>') {
                        return Err(self.error("unknown token '<'"));
                    }
                    Tok::Iff
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut ident = String::new();
                    while matches!(self.chars.peek(), Some(c) if c.is_ascii_alphanumeric() || *c == '_')
                    {
                        ident.push(self.bump().unwrap());
                    }
                    match ident.as_str() {
                        "true" | "tt" => Tok::True,
                        "false" | "ff" => Tok::False,
                        "X" => Tok::Next,
                        "N" => Tok::WeakNext,
                        "F" => Tok::Eventually,
                        "G" => Tok::Globally,
                        "U" => Tok::Until,
                        "R" => Tok::Release,
                        _ => Tok::Ident(ident),
                    }
                }
                c => return Err(self.error(format!("unknown token '{c}'"))),
            };
            out.push((tok, line, col));
        }
    }
}

struct Parser {
    tokens: Vec<(Tok, usize, usize)>,
    pos: usize,
}

// Binding powers; binaries with power < min stop the loop.
const BP_IFF: u8 = 1;
const BP_IMPLIES: u8 = 2;
const BP_OR: u8 = 3;
const BP_AND: u8 = 4;
const BP_TEMPORAL: u8 = 5;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        (self.tokens[self.pos].1, self.tokens[self.pos].2)
    }

    fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn parse_binary(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let (bp, right_assoc) = match self.peek() {
                Tok::Until | Tok::Release => (BP_TEMPORAL, true),
                Tok::And => (BP_AND, false),
                Tok::Or => (BP_OR, false),
                Tok::Implies => (BP_IMPLIES, true),
                Tok::Iff => (BP_IFF, false),
                _ => break,
            };
            if bp < min_bp {
                break;
            }
            let op = self.advance();
            let rhs = self.parse_binary(if right_assoc { bp } else { bp + 1 })?;
            let (l, r) = (Box::new(lhs), Box::new(rhs));
            lhs = match op {
                Tok::Until => Expr::Until(l, r),
                Tok::Release => Expr::Release(l, r),
                Tok::And => Expr::And(l, r),
                Tok::Or => Expr::Or(l, r),
                Tok::Implies => Expr::Implies(l, r),
                Tok::Iff => Expr::Iff(l, r),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Not | Tok::Next | Tok::WeakNext | Tok::Eventually | Tok::Globally => {
                let op = self.advance();
                let inner = Box::new(self.parse_unary()?);
                Ok(match op {
                    Tok::Not => Expr::Not(inner),
                    Tok::Next => Expr::Next(inner),
                    Tok::WeakNext => Expr::WeakNext(inner),
                    Tok::Eventually => Expr::Eventually(inner),
                    Tok::Globally => Expr::Globally(inner),
                    _ => unreachable!(),
                })
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.advance();
                Ok(Expr::True)
            }
            Tok::False => {
                self.advance();
                Ok(Expr::False)
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(Expr::Prop(name))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.parse_binary(BP_IFF)?;
                if self.peek() != &Tok::RParen {
                    return Err(self.error("unbalanced parentheses: expected ')'"));
                }
                self.advance();
                Ok(inner)
            }
            Tok::RParen => Err(self.error("unbalanced parentheses: unexpected ')'")),
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }
}

/// Parses surface syntax into the raw expression tree.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let tokens = Lexer::new(text).tokens()?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.parse_binary(BP_IFF)?;
    if parser.peek() != &Tok::Eof {
        return Err(parser.error(format!(
            "unexpected {} after formula",
            parser.peek().describe()
        )));
    }
    Ok(expr)
}

/// Parses and lowers to canonical NNF in one step, registering any new
/// propositions in `alphabet`.
pub fn parse_formula(text: &str, alphabet: &mut Alphabet) -> Result<Formula, ParseError> {
    let expr = parse_expr(text)?;
    expr.to_nnf(alphabet).map_err(|e| ParseError {
        line: 1,
        col: 1,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::formula::FormulaKind;

    fn parse(text: &str) -> (Formula, Alphabet) {
        let mut alphabet = Alphabet::empty();
        let f = parse_formula(text, &mut alphabet).unwrap();
        (f, alphabet)
    }

    #[test]
    fn basic_constructors() {
        let (f, a) = parse("a U b");
        let (pa, pb) = (a.prop_index("a").unwrap(), a.prop_index("b").unwrap());
        assert_eq!(f, Formula::until(Formula::prop(pa), Formula::prop(pb)));
    }

    #[test]
    fn negation_lowers_to_release() {
        let (f, a) = parse("!(a U b)");
        let (pa, pb) = (a.prop_index("a").unwrap(), a.prop_index("b").unwrap());
        assert_eq!(
            f,
            Formula::release(Formula::not_prop(pa), Formula::not_prop(pb))
        );
    }

    #[test]
    fn globally_is_release_of_false() {
        let (f, a) = parse("G y");
        let y = a.prop_index("y").unwrap();
        assert_eq!(f, Formula::release(Formula::FALSE, Formula::prop(y)));
    }

    #[test]
    fn precedence_and_associativity() {
        let mut a = Alphabet::empty();
        let f1 = parse_formula("a U b U c", &mut a).unwrap();
        let f2 = parse_formula("a U (b U c)", &mut a).unwrap();
        assert_eq!(f1, f2);

        let f1 = parse_formula("a && b || c", &mut a).unwrap();
        let f2 = parse_formula("(a && b) || c", &mut a).unwrap();
        assert_eq!(f1, f2);

        let f1 = parse_formula("!a U b", &mut a).unwrap();
        let f2 = parse_formula("(!a) U b", &mut a).unwrap();
        assert_eq!(f1, f2);

        let f1 = parse_formula("a -> b -> c", &mut a).unwrap();
        let f2 = parse_formula("a -> (b -> c)", &mut a).unwrap();
        assert_eq!(f1, f2);

        // single '&' / '|' accepted
        let f1 = parse_formula("a & b | c", &mut a).unwrap();
        let f2 = parse_formula("a && b || c", &mut a).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn next_variants() {
        let (f, a) = parse("X a");
        assert!(matches!(f.kind(), FormulaKind::Next(_)));
        let y = a.prop_index("a").unwrap();
        assert_eq!(f, Formula::next(Formula::prop(y)));

        let (f, _) = parse("N a");
        assert!(matches!(f.kind(), FormulaKind::WeakNext(_)));
    }

    #[test]
    fn keyword_letters_are_operators_not_idents() {
        // "Xab" is an identifier, "X ab" an application of strong next
        let (f, a) = parse("Xab");
        assert_eq!(f, Formula::prop(a.prop_index("Xab").unwrap()));
        let (f, _) = parse("X ab");
        assert!(matches!(f.kind(), FormulaKind::Next(_)));
    }

    #[test]
    fn error_positions() {
        let err = parse_expr("a U (b").unwrap_err();
        assert!(err.message.contains("unbalanced parentheses"), "{err}");

        let err = parse_expr("a @ b").unwrap_err();
        assert!(err.message.contains("unknown token"), "{err}");
        assert_eq!((err.line, err.col), (1, 3));

        let err = parse_expr("a U\nU b").unwrap_err();
        assert_eq!(err.line, 2);

        assert!(parse_expr("").is_err());
        assert!(parse_expr("a b").is_err());
    }
}
