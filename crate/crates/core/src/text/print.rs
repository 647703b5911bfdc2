//! Canonical printers. Every printed form parses back to an equal value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::poly::{Coeff, Monomial, Poly};
use crate::series::{Affine, PowerSeries, RuleFactor, RuleTerm, TailRule};
use crate::valuation::Ball;

pub fn print_rational(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn print_monomial(m: &Monomial) -> String {
    let parts: Vec<String> = m
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(i, e)| {
            if *e == 1 {
                format!("X{}", i + 1)
            } else {
                format!("X{}^{}", i + 1, e)
            }
        })
        .collect();
    parts.join("*")
}

/// Terms in decreasing monomial order.
pub fn print_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        if m.is_one() {
            out.push_str(&print_rational(&a));
        } else if a.is_one() {
            out.push_str(&print_monomial(m));
        } else {
            out.push_str(&print_rational(&a));
            out.push('*');
            out.push_str(&print_monomial(m));
        }
    }
    out
}

/// Scales numerator and denominator by one rational so both have coprime
/// integer coefficients.
fn integer_normalize(num: &Poly, den: &Poly) -> (Poly, Poly) {
    let mut lcm = BigInt::one();
    for (_, c) in num.terms().chain(den.terms()) {
        lcm = lcm.lcm(c.denom());
    }
    let mut g = BigInt::zero();
    for (_, c) in num.terms().chain(den.terms()) {
        let scaled = c.numer() * (&lcm / c.denom());
        g = g.gcd(&scaled);
    }
    let factor = Coeff::new(lcm, g);
    (num.scale(&factor), den.scale(&factor))
}

pub fn print_field(a: &FieldElem) -> String {
    if a.is_zero() {
        return "0".into();
    }
    let (num, den) = integer_normalize(a.num(), a.den());
    if den.as_constant().is_some_and(|c| c.is_one()) {
        return print_poly(&num);
    }
    let num_s = if num.num_terms() > 1 {
        format!("({})", print_poly(&num))
    } else {
        print_poly(&num)
    };
    let bare_den = den.is_constant()
        || den.num_terms() == 1
            && den
            .leading()
            .is_some_and(|(m, c)| c.is_one() && m.exponents().iter().filter(|e| **e > 0).count() == 1);
    let den_s = if bare_den {
        print_poly(&den)
    } else {
        format!("({})", print_poly(&den))
    };
    format!("{num_s}/{den_s}")
}

/// `(negative, magnitude)` when the sign can be pulled out of a single-term numerator.
fn split_sign(c: &FieldElem) -> (bool, FieldElem) {
    let single = c.num().num_terms() == 1;
    if single && c.num().leading_coeff().is_negative() {
        (true, -c)
    } else {
        (false, c.clone())
    }
}

fn as_factor(c: &FieldElem) -> String {
    let s = print_field(c);
    if c.num().num_terms() > 1 && c.den().is_constant() {
        format!("({s})")
    } else {
        s
    }
}

fn print_base(var: &str, center: &FieldElem) -> String {
    if center.is_zero() {
        return var.to_string();
    }
    let (neg, mag) = split_sign(center);
    if neg {
        format!("({var} + {})", as_factor(&mag))
    } else {
        format!("({var} - {})", as_factor(center))
    }
}

/// Stored part of a series as an expression in `var`, lowest order first.
pub fn print_series_expr(s: &PowerSeries, var: &str) -> String {
    let base = print_base(var, s.center());
    let mut out = String::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (neg, body) = if k == 0 {
            let (neg, mag) = split_sign(c);
            (neg, print_field(&mag))
        } else {
            let (neg, mag) = split_sign(c);
            let power = if k == 1 {
                base.clone()
            } else {
                format!("{base}^{k}")
            };
            if mag.is_one() {
                (neg, power)
            } else {
                (neg, format!("{}*{power}", as_factor(&mag)))
            }
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    if !s.is_polynomial() {
        out.push_str(" + [bounded tail]");
    }
    out
}

pub fn print_ball(b: &Ball) -> String {
    match b {
        Ball::OrderOpen { center, radius } => {
            format!("O({}; {})", print_field(center), print_field(radius))
        }
        Ball::ValClosed { center, radius } => format!("B({}; {radius})", print_field(center)),
        Ball::ValOpen { center, radius } => format!("B({}; {radius}-)", print_field(center)),
    }
}

fn print_affine(a: &Affine) -> String {
    let mut s = match a.slope {
        0 => return a.offset.to_string(),
        1 => "n".to_string(),
        -1 => "-n".to_string(),
        k => format!("{k}*n"),
    };
    match a.offset.signum() {
        1 => s.push_str(&format!("+{}", a.offset)),
        -1 => s.push_str(&format!("-{}", -a.offset)),
        _ => {}
    }
    s
}

fn print_factor(f: &RuleFactor) -> String {
    let base = if f.index.slope == 0 {
        format!("g{}", f.index.offset)
    } else {
        format!("g({})", print_affine(&f.index))
    };
    let e = f.exponent;
    if e == Affine::constant(1) {
        base
    } else if e.slope == 0 {
        format!("{base}^{}", e.offset)
    } else if e.offset == 0 && e.slope.abs() == 1 {
        format!("{base}^{}", print_affine(&e))
    } else {
        format!("{base}^({})", print_affine(&e))
    }
}

fn print_term(t: &RuleTerm) -> String {
    if t.factors().is_empty() {
        return "1".into();
    }
    t.factors().iter().map(print_factor).collect::<Vec<_>>().join("*")
}

/// Rule text, for the rule forms the grammar can express.
pub fn print_rule(r: &TailRule) -> Option<String> {
    match r {
        TailRule::Zero => Some("0v".into()),
        TailRule::Term(t) => Some(print_term(t)),
        TailRule::Max(rs) => {
            let parts: Option<Vec<String>> = rs.iter().map(print_rule).collect();
            Some(format!("max({})", parts?.join(", ")))
        }
        _ => None,
    }
}

/// The series file form. Fails for derived series whose uncertainty has no
/// rule-grammar representation.
pub fn print_series_file(s: &PowerSeries) -> Result<String> {
    let coeffs: Vec<String> = s.coeffs().iter().map(print_field).collect();
    let mut out = format!(
        "center: {}\ncoeffs: [{}]\n",
        print_field(s.center()),
        coeffs.join(", ")
    );
    if s.is_polynomial() {
        out.push_str(&format!("tail: zero_after: {}\n", s.len() - 1));
        return Ok(out);
    }
    let profile = s.error_profile();
    let rule = if profile.head.iter().all(|g| g.is_zero()) {
        print_rule(&profile.tail)
    } else {
        None
    };
    let Some(rule) = rule else {
        return Err(Error::domain(
            "this series carries a derived uncertainty bound that the file format cannot express",
        ));
    };
    let sched: Vec<String> = s.schedule().iter().map(u64::to_string).collect();
    out.push_str(&format!(
        "tail: bound: {{rule: {rule}, schedule: [{}]}}\n",
        sched.join(", ")
    ));
    Ok(out)
}
