use num_bigint::BigInt;

use crate::error::{Error, ParseError, Result, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(BigInt),
    Ident(String),
    /// The zero of the value group, written `0v`.
    ZeroV,
    Sym(char),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::ZeroV => "`0v`".into(),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const SYMBOLS: &str = "+-*/^()[],;:{}";

/// Splits `src` into tokens. `#` starts a comment running to the end of the line.
pub fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column: col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let ends_word = |k: usize| k >= chars.len() || !is_ident_char(chars[k]);
            if digits == "0" && i < chars.len() && chars[i] == 'v' && ends_word(i + 1) {
                i += 1;
                col += 2;
                out.push(Token {
                    tok: Tok::ZeroV,
                    span,
                });
                continue;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Int(digits.parse().expect("decimal digits")),
                span,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                span,
            });
            continue;
        }
        if SYMBOLS.contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                span,
            });
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Parse(ParseError {
            span,
            message: format!("unexpected character `{c}`"),
            expected: Vec::new(),
        }));
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, column: col },
    });
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// `X<n>` with `n >= 1`; `Some(Err)` for `X0`.
pub fn variable_index(name: &str) -> Option<std::result::Result<u32, ()>> {
    indexed(name, 'X')
}

/// `g<n>` with `n >= 1`; `Some(Err)` for `g0`.
pub fn generator_index(name: &str) -> Option<std::result::Result<u32, ()>> {
    indexed(name, 'g')
}

fn indexed(name: &str, prefix: char) -> Option<std::result::Result<u32, ()>> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    Some(match rest.parse::<u32>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(()),
    })
}

/// Words with a fixed meaning in some grammar; never usable as binding names.
pub fn is_reserved_name(name: &str) -> bool {
    variable_index(name).is_some()
        || generator_index(name).is_some()
        || matches!(name, "z" | "y" | "n" | "g" | "max" | "O" | "B")
}

/// `[A-Za-z_][A-Za-z0-9_]*` and not reserved.
pub fn is_valid_binding_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(is_ident_char)
        && !is_reserved_name(name)
}
