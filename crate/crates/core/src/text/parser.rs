//! Recursive-descent parser shared by all text grammars.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::lexer::{lex, Tok, Token};
use crate::error::{Error, ParseError, Result, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Arithmetic expression over integer literals and names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Name(String, Span),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64, Span),
}

/// Largest accepted exponent magnitude in `^`.
pub const MAX_EXPONENT: i64 = 10_000;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>, expected: &[&str]) -> Error {
        Error::Parse(ParseError {
            span: self.span(),
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn unexpected(&self, expected: &[&str]) -> Error {
        self.error(format!("unexpected {}", self.peek().describe()), expected)
    }

    pub fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{c}`")]))
        }
    }

    pub fn expect_eof(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    pub fn expect_ident(&mut self, word: &str) -> Result<()> {
        match self.peek() {
            Tok::Ident(s) if s == word => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&[&format!("`{word}`")])),
        }
    }

    pub fn at_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    pub fn int(&mut self) -> Result<BigInt> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    pub fn small_int(&mut self) -> Result<i64> {
        let span = self.span();
        let n = self.int()?;
        n.to_i64().ok_or_else(|| {
            Error::Parse(ParseError {
                span,
                message: "integer out of range".into(),
                expected: Vec::new(),
            })
        })
    }

    /// `-`? integer.
    pub fn signed_int(&mut self) -> Result<i64> {
        let neg = self.eat_sym('-');
        let n = self.small_int()?;
        Ok(if neg { -n } else { n })
    }

    pub fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_sym('+') {
                BinOp::Add
            } else if self.eat_sym('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_sym('*') {
                BinOp::Mul
            } else if self.eat_sym('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_sym('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat_sym('^') {
            return Ok(base);
        }
        let span = self.span();
        let k = if self.eat_sym('(') {
            let k = self.signed_int()?;
            self.expect_sym(')')?;
            k
        } else {
            self.signed_int()
                .map_err(|_| self.unexpected(&["integer exponent"]))?
        };
        if k.abs() > MAX_EXPONENT {
            return Err(Error::Parse(ParseError {
                span,
                message: format!("exponent {k} exceeds the limit {MAX_EXPONENT}"),
                expected: Vec::new(),
            }));
        }
        Ok(Expr::Pow(Box::new(base), k, span))
    }

    fn atom(&mut self) -> Result<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Name(name, span))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            _ => Err(self.unexpected(&["integer", "identifier", "`(`", "`-`"])),
        }
    }
}

pub(crate) fn parse_error_at(span: Span, message: impl Into<String>) -> Error {
    Error::Parse(ParseError {
        span,
        message: message.into(),
        expected: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let mut p = Parser::new("-X1^2 + 3*X2/4").unwrap();
        let e = p.expr().unwrap();
        p.expect_eof().unwrap();
        match e {
            Expr::Bin(BinOp::Add, lhs, _) => assert!(matches!(*lhs, Expr::Neg(_))),
            other => panic!("unexpected tree {other:?}"),
        }
    }

    #[test]
    fn unterminated_paren_reports_column() {
        let mut p = Parser::new("(X1+").unwrap();
        let err = p.expr().unwrap_err();
        match err {
            Error::Parse(pe) => {
                assert_eq!(pe.span, Span { line: 1, column: 5 });
                assert!(!pe.expected.is_empty());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn exponent_forms() {
        for src in ["X1^-2", "X1^(-2)"] {
            let mut p = Parser::new(src).unwrap();
            assert!(matches!(p.expr().unwrap(), Expr::Pow(_, -2, _)));
        }
        let mut p = Parser::new("X1^X2").unwrap();
        assert!(p.expr().is_err());
    }
}
