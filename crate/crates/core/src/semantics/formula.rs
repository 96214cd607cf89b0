//! Boolean formulas over evidence atoms.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! disj := conj ('|' conj)*
//! conj := unary ('&' unary)*
//! unary := '!' unary | '(' disj ')' | ident
//! ident := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! `¬`, `∧` and `∨` are accepted as aliases for `!`, `&` and `|`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// Atom name and its 1-based column in the source text (0 when synthesized).
    Atom(String, usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into(), 0)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn parse(text: &str) -> Result<Formula> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens: &tokens, pos: 0, end_column: text.chars().count() + 1 };
        let f = parser.disjunction()?;
        if let Some(tok) = parser.peek() {
            return Err(Error::syntax(tok.column, format!("unexpected {}", tok.kind)));
        }
        Ok(f)
    }

    /// Atom occurrences in left-to-right order.
    pub fn atoms(&self) -> Vec<(&str, usize)> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<(&'a str, usize)>) {
        match self {
            Formula::Atom(name, col) => out.push((name, *col)),
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Truth value under an assignment given as a name lookup.
    pub fn eval(&self, value_of: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Formula::Atom(name, _) => value_of(name),
            Formula::Not(f) => !f.eval(value_of),
            Formula::And(a, b) => a.eval(value_of) && b.eval(value_of),
            Formula::Or(a, b) => a.eval(value_of) || b.eval(value_of),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 0,
            Formula::And(..) => 1,
            Formula::Not(_) | Formula::Atom(..) => 2,
        }
    }

    fn fmt_child(&self, child: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() < self.precedence() {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(name, _) => f.write_str(name),
            Formula::Not(inner) => {
                f.write_str("!")?;
                self.fmt_child(inner, f)
            }
            Formula::And(a, b) => {
                self.fmt_child(a, f)?;
                f.write_str(" & ")?;
                // `&` is associative, but keep right-nested trees parenthesized
                // so that printing and re-parsing gives back the same tree.
                if matches!(**b, Formula::And(..)) {
                    write!(f, "({b})")
                } else {
                    self.fmt_child(b, f)
                }
            }
            Formula::Or(a, b) => {
                self.fmt_child(a, f)?;
                f.write_str(" | ")?;
                if matches!(**b, Formula::Or(..)) {
                    write!(f, "({b})")
                } else {
                    self.fmt_child(b, f)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    Not,
    And,
    Or,
    LParen,
    RParen,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(name) => write!(f, "identifier `{name}`"),
            TokenKind::Not => f.write_str("`!`"),
            TokenKind::And => f.write_str("`&`"),
            TokenKind::Or => f.write_str("`|`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    column: usize,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' | '¬' => TokenKind::Not,
            '&' | '∧' => TokenKind::And,
            '|' | '∨' => TokenKind::Or,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    i += 1;
                }
                tokens.push(Token { kind: TokenKind::Ident(chars[start..i].iter().collect()), column });
                continue;
            }
            other => return Err(Error::syntax(column, format!("unexpected character `{other}`"))),
        };
        tokens.push(Token { kind, column });
        i += 1;
    }
    Ok(tokens)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&TokenKind::Or) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&TokenKind::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::syntax(self.end_column, "expected a formula, found end of input"));
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Not => Ok(Formula::not(self.unary()?)),
            TokenKind::LParen => {
                let inner = self.disjunction()?;
                if !self.eat(&TokenKind::RParen) {
                    let column = self.peek().map_or(self.end_column, |t| t.column);
                    return Err(Error::syntax(column, "expected `)`"));
                }
                Ok(inner)
            }
            TokenKind::Ident(name) => Ok(Formula::Atom(name, tok.column)),
            other => Err(Error::syntax(tok.column, format!("expected a formula, found {other}"))),
        }
    }
}
