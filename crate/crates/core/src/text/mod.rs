//! Text grammars for field elements, value-group elements, balls, tail
//! rules and series, with their canonical printers.

pub mod lexer;
pub mod parser;
mod print;

use num_traits::ToPrimitive;

pub use lexer::{is_reserved_name, is_valid_binding_name};
pub use parser::{Expr, Parser};
pub use print::{
    print_ball, print_field, print_poly, print_rational, print_rule, print_series_expr,
    print_series_file,
};

use crate::error::{Error, Result, Span};
use crate::field::FieldElem;
use crate::gamma::GammaVal;
use crate::poly::Coeff;
use crate::series::{Affine, PowerSeries, RuleFactor, RuleTerm, TailRule};
use crate::valuation::Ball;
use lexer::{generator_index, variable_index, Tok};
use parser::{parse_error_at, BinOp};

/// Resolves names that are not variables, such as stored bindings.
pub type FieldLookup<'a> = &'a dyn Fn(&str) -> Option<FieldElem>;

fn no_lookup(_: &str) -> Option<FieldElem> {
    None
}

pub fn parse_field(src: &str) -> Result<FieldElem> {
    parse_field_with(src, &no_lookup)
}

pub fn parse_field_with(src: &str, lookup: FieldLookup<'_>) -> Result<FieldElem> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    eval_field(&e, lookup)
}

fn resolve_name(name: &str, span: Span, lookup: FieldLookup<'_>) -> Result<FieldElem> {
    match variable_index(name) {
        Some(Ok(n)) => Ok(FieldElem::var(n)),
        Some(Err(())) => Err(parse_error_at(span, "variable index must be at least 1")),
        None => lookup(name)
            .ok_or_else(|| parse_error_at(span, format!("unknown identifier `{name}`"))),
    }
}

pub fn eval_field(e: &Expr, lookup: FieldLookup<'_>) -> Result<FieldElem> {
    match e {
        Expr::Int(n) => Ok(FieldElem::from_rational(Coeff::from_integer(n.clone()))),
        Expr::Name(name, span) => resolve_name(name, *span, lookup),
        Expr::Neg(a) => Ok(-eval_field(a, lookup)?),
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_field(a, lookup)?, eval_field(b, lookup)?);
            match op {
                BinOp::Add => Ok(&a + &b),
                BinOp::Sub => Ok(&a - &b),
                BinOp::Mul => Ok(&a * &b),
                BinOp::Div => a.div(&b),
            }
        }
        Expr::Pow(a, k, _) => eval_field(a, lookup)?.pow(*k),
    }
}

/// Dense polynomial in one indeterminate with field coefficients.
type Dense = Vec<FieldElem>;

fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let mut out = vec![FieldElem::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

fn dense_add(a: &Dense, b: &Dense, sign: bool) -> Dense {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            if sign {
                &x + &y
            } else {
                &x - &y
            }
        })
        .collect()
}

fn dense_constant(d: &Dense) -> Option<&FieldElem> {
    if d.iter().skip(1).all(FieldElem::is_zero) {
        d.first()
    } else {
        None
    }
}

struct SeriesEval<'a> {
    lookup: FieldLookup<'a>,
    indeterminate: Option<(String, Span)>,
}

impl SeriesEval<'_> {
    fn eval(&mut self, e: &Expr) -> Result<Dense> {
        match e {
            Expr::Int(n) => Ok(vec![FieldElem::from_rational(Coeff::from_integer(n.clone()))]),
            Expr::Name(name, span) if name == "z" || name == "y" => {
                match &self.indeterminate {
                    Some((prev, _)) if prev != name => {
                        return Err(parse_error_at(
                            *span,
                            format!("mixes indeterminates `{prev}` and `{name}`"),
                        ))
                    }
                    _ => self.indeterminate = Some((name.clone(), *span)),
                }
                Ok(vec![FieldElem::zero(), FieldElem::one()])
            }
            Expr::Name(name, span) => Ok(vec![resolve_name(name, *span, self.lookup)?]),
            Expr::Neg(a) => Ok(self.eval(a)?.iter().map(|c| -c).collect()),
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                match op {
                    BinOp::Add => Ok(dense_add(&a, &b, true)),
                    BinOp::Sub => Ok(dense_add(&a, &b, false)),
                    BinOp::Mul => Ok(dense_mul(&a, &b)),
                    BinOp::Div => {
                        let d = dense_constant(&b).ok_or_else(|| {
                            Error::domain("a series expression can only be divided by a constant")
                        })?;
                        let inv = d.inv()?;
                        Ok(a.iter().map(|c| c * &inv).collect())
                    }
                }
            }
            Expr::Pow(a, k, span) => {
                let base = self.eval(a)?;
                if *k < 0 {
                    let c = dense_constant(&base).ok_or_else(|| {
                        parse_error_at(*span, "negative powers need a constant base")
                    })?;
                    return Ok(vec![c.pow(*k)?]);
                }
                let mut acc = vec![FieldElem::one()];
                for _ in 0..*k {
                    acc = dense_mul(&acc, &base);
                }
                Ok(acc)
            }
        }
    }
}

/// A polynomial expression in `z` (or `y`) as an exact series centered at `0`.
/// Returns the indeterminate used, `z` when none appears.
pub fn parse_series_expr_with(src: &str, lookup: FieldLookup<'_>) -> Result<(PowerSeries, String)> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    let mut ev = SeriesEval {
        lookup,
        indeterminate: None,
    };
    let coeffs = ev.eval(&e)?;
    let var = ev.indeterminate.map_or_else(|| "z".to_string(), |(v, _)| v);
    Ok((PowerSeries::polynomial(FieldElem::zero(), coeffs), var))
}

pub fn parse_series_expr(src: &str) -> Result<PowerSeries> {
    Ok(parse_series_expr_with(src, &no_lookup)?.0)
}

fn gamma_factor(p: &mut Parser) -> Result<(u32, i64)> {
    let span = p.span();
    let idx = match p.peek().clone() {
        Tok::Ident(name) => match generator_index(&name) {
            Some(Ok(i)) => i,
            Some(Err(())) => return Err(parse_error_at(span, "gamma index must be at least 1")),
            None => return Err(p.unexpected(&["`g<index>`"])),
        },
        _ => return Err(p.unexpected(&["`g<index>`", "`1`", "`0v`", "`[`"])),
    };
    p.bump();
    let e = if p.eat_sym('^') {
        if p.eat_sym('(') {
            let e = p.signed_int()?;
            p.expect_sym(')')?;
            e
        } else {
            p.signed_int()?
        }
    } else {
        1
    };
    Ok((idx, e))
}

pub(crate) fn gamma(p: &mut Parser) -> Result<GammaVal> {
    match p.peek().clone() {
        Tok::ZeroV => {
            p.bump();
            Ok(GammaVal::zero())
        }
        Tok::Int(n) if n == 1.into() => {
            p.bump();
            Ok(GammaVal::one())
        }
        Tok::Sym('[') => {
            p.bump();
            let mut list = Vec::new();
            if !p.at_sym(']') {
                loop {
                    list.push(p.signed_int()?);
                    if !p.eat_sym(',') {
                        break;
                    }
                }
            }
            p.expect_sym(']')?;
            Ok(GammaVal::from_list(&list))
        }
        _ => {
            let mut pairs = vec![gamma_factor(p)?];
            while p.eat_sym('*') {
                pairs.push(gamma_factor(p)?);
            }
            GammaVal::from_exponents(pairs)
        }
    }
}

pub fn parse_gamma(src: &str) -> Result<GammaVal> {
    let mut p = Parser::new(src)?;
    let g = gamma(&mut p)?;
    p.expect_eof()?;
    Ok(g)
}

pub fn parse_ball_with(src: &str, lookup: FieldLookup<'_>) -> Result<Ball> {
    let mut p = Parser::new(src)?;
    let kind = match p.peek() {
        Tok::Ident(s) if s == "O" || s == "B" => s.clone(),
        _ => return Err(p.unexpected(&["`O`", "`B`"])),
    };
    p.bump();
    p.expect_sym('(')?;
    let center = eval_field(&p.expr()?, lookup)?;
    p.expect_sym(';')?;
    let ball = if kind == "O" {
        let radius = eval_field(&p.expr()?, lookup)?;
        Ball::order_open(center, radius)?
    } else {
        let radius = gamma(&mut p)?;
        if p.eat_sym('-') {
            Ball::val_open(center, radius)?
        } else {
            Ball::val_closed(center, radius)?
        }
    };
    p.expect_sym(')')?;
    p.expect_eof()?;
    Ok(ball)
}

pub fn parse_ball(src: &str) -> Result<Ball> {
    parse_ball_with(src, &no_lookup)
}

/// `[-] term (± term)*` with terms `k`, `n`, `k*n`.
fn affine(p: &mut Parser) -> Result<Affine> {
    let mut acc = Affine::constant(0);
    let mut sign = if p.eat_sym('-') { -1 } else { 1 };
    loop {
        let (slope, offset) = if p.at_ident("n") {
            p.bump();
            (1, 0)
        } else {
            let k = p.small_int()?;
            if p.eat_sym('*') {
                p.expect_ident("n")?;
                (k, 0)
            } else {
                (0, k)
            }
        };
        acc = Affine::new(acc.slope + sign * slope, acc.offset + sign * offset);
        if p.eat_sym('+') {
            sign = 1;
        } else if p.eat_sym('-') {
            sign = -1;
        } else {
            return Ok(acc);
        }
    }
}

fn rule_exponent(p: &mut Parser) -> Result<Affine> {
    if p.eat_sym('(') {
        let a = affine(p)?;
        p.expect_sym(')')?;
        return Ok(a);
    }
    let neg = p.eat_sym('-');
    let s = if neg { -1 } else { 1 };
    if p.at_ident("n") {
        p.bump();
        return Ok(Affine::new(s, 0));
    }
    match p.peek() {
        Tok::Int(_) => Ok(Affine::constant(s * p.small_int()?)),
        _ => Err(p.unexpected(&["integer", "`n`", "`(`"])),
    }
}

fn rule_factor(p: &mut Parser) -> Result<Option<RuleFactor>> {
    let span = p.span();
    let index = match p.peek().clone() {
        Tok::Int(n) if n == 1.into() => {
            p.bump();
            return Ok(None);
        }
        Tok::Ident(name) if name == "g" => {
            p.bump();
            p.expect_sym('(')?;
            let a = affine(p)?;
            p.expect_sym(')')?;
            a
        }
        Tok::Ident(name) => match generator_index(&name) {
            Some(Ok(i)) => {
                p.bump();
                Affine::constant(i as i64)
            }
            Some(Err(())) => return Err(parse_error_at(span, "gamma index must be at least 1")),
            None => return Err(p.unexpected(&["`g<index>`", "`g(`", "`max`", "`1`", "`0v`"])),
        },
        _ => return Err(p.unexpected(&["`g<index>`", "`g(`", "`max`", "`1`", "`0v`"])),
    };
    let exponent = if p.eat_sym('^') {
        rule_exponent(p)?
    } else {
        Affine::constant(1)
    };
    Ok(Some(RuleFactor { index, exponent }))
}

pub(crate) fn rule(p: &mut Parser) -> Result<TailRule> {
    if *p.peek() == Tok::ZeroV {
        p.bump();
        return Ok(TailRule::Zero);
    }
    if p.at_ident("max") && *p.peek_at(1) == Tok::Sym('(') {
        p.bump();
        p.bump();
        let mut parts = vec![rule(p)?];
        while p.eat_sym(',') {
            parts.push(rule(p)?);
        }
        p.expect_sym(')')?;
        return Ok(TailRule::max_of(parts));
    }
    let span = p.span();
    let mut factors = Vec::new();
    factors.extend(rule_factor(p)?);
    while p.eat_sym('*') {
        factors.extend(rule_factor(p)?);
    }
    let term = RuleTerm::new(factors).map_err(|e| parse_error_at(span, e.to_string()))?;
    Ok(TailRule::Term(term))
}

pub fn parse_rule(src: &str) -> Result<TailRule> {
    let mut p = Parser::new(src)?;
    let r = rule(&mut p)?;
    p.expect_eof()?;
    Ok(r)
}

fn u64_list(p: &mut Parser) -> Result<Vec<u64>> {
    p.expect_sym('[')?;
    let mut out = Vec::new();
    if !p.at_sym(']') {
        loop {
            let span = p.span();
            let n = p.int()?;
            out.push(
                n.to_u64()
                    .ok_or_else(|| parse_error_at(span, "expected a nonnegative integer"))?,
            );
            if !p.eat_sym(',') {
                break;
            }
        }
    }
    p.expect_sym(']')?;
    Ok(out)
}

enum TailSpec {
    ZeroAfter(u64, Span),
    Bound(TailRule, Vec<u64>),
}

fn tail_spec(p: &mut Parser) -> Result<TailSpec> {
    if p.at_ident("zero_after") {
        p.bump();
        p.expect_sym(':')?;
        let span = p.span();
        let n = p.int()?;
        let n = n
            .to_u64()
            .ok_or_else(|| parse_error_at(span, "expected a nonnegative integer"))?;
        return Ok(TailSpec::ZeroAfter(n, span));
    }
    if p.at_ident("bound") {
        p.bump();
        p.expect_sym(':')?;
        p.expect_sym('{')?;
        p.expect_ident("rule")?;
        p.expect_sym(':')?;
        let r = rule(p)?;
        p.expect_sym(',')?;
        p.expect_ident("schedule")?;
        p.expect_sym(':')?;
        let schedule = u64_list(p)?;
        p.expect_sym('}')?;
        return Ok(TailSpec::Bound(r, schedule));
    }
    Err(p.unexpected(&["`zero_after`", "`bound`"]))
}

/// Parses the `center: … / coeffs: [...] / tail: …` series file format.
pub fn parse_series_file_with(src: &str, lookup: FieldLookup<'_>) -> Result<PowerSeries> {
    let mut p = Parser::new(src)?;
    let mut center = None;
    let mut coeffs: Option<Vec<FieldElem>> = None;
    let mut tail = None;
    while *p.peek() != Tok::Eof {
        let span = p.span();
        let key = match p.peek() {
            Tok::Ident(k) => k.clone(),
            _ => return Err(p.unexpected(&["`center`", "`coeffs`", "`tail`"])),
        };
        p.bump();
        p.expect_sym(':')?;
        let dup = || parse_error_at(span, format!("duplicate key `{key}`"));
        match key.as_str() {
            "center" => {
                if center.is_some() {
                    return Err(dup());
                }
                center = Some(eval_field(&p.expr()?, lookup)?);
            }
            "coeffs" => {
                if coeffs.is_some() {
                    return Err(dup());
                }
                p.expect_sym('[')?;
                let mut list = Vec::new();
                if !p.at_sym(']') {
                    loop {
                        list.push(eval_field(&p.expr()?, lookup)?);
                        if !p.eat_sym(',') {
                            break;
                        }
                    }
                }
                p.expect_sym(']')?;
                coeffs = Some(list);
            }
            "tail" => {
                if tail.is_some() {
                    return Err(dup());
                }
                tail = Some(tail_spec(&mut p)?);
            }
            _ => {
                return Err(crate::error::Error::Parse(crate::error::ParseError {
                    span,
                    message: format!("unknown key `{key}`"),
                    expected: vec!["`center`".into(), "`coeffs`".into(), "`tail`".into()],
                }))
            }
        }
    }
    let end = p.span();
    let center = center.unwrap_or_else(FieldElem::zero);
    let mut coeffs = coeffs.ok_or_else(|| parse_error_at(end, "missing `coeffs`"))?;
    if coeffs.is_empty() {
        coeffs.push(FieldElem::zero());
    }
    match tail.ok_or_else(|| parse_error_at(end, "missing `tail`"))? {
        TailSpec::ZeroAfter(n, span) => {
            let n = n as usize;
            if coeffs.iter().skip(n + 1).any(|c| !c.is_zero()) {
                return Err(parse_error_at(
                    span,
                    format!("nonzero coefficient listed after index {n}"),
                ));
            }
            coeffs.truncate(n + 1);
            Ok(PowerSeries::polynomial(center, coeffs))
        }
        TailSpec::Bound(rule, schedule) => PowerSeries::with_bound(center, coeffs, rule, schedule),
    }
}

pub fn parse_series_file(src: &str) -> Result<PowerSeries> {
    parse_series_file_with(src, &no_lookup)
}
