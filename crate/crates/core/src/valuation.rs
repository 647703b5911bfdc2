//! The valuation, the dyadic ultrametric, the residue map and balls.

use std::cmp::Ordering;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::gamma::GammaVal;
use crate::poly::{Coeff, Sign};

/// A value of the ultrametric: `0` or `2^{-m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DyadicDist {
    Zero,
    /// `2^{-m}`.
    Pow(u32),
}

impl DyadicDist {
    pub fn exponent(self) -> Option<u32> {
        match self {
            DyadicDist::Zero => None,
            DyadicDist::Pow(m) => Some(m),
        }
    }
}

impl Ord for DyadicDist {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DyadicDist::Zero, DyadicDist::Zero) => Ordering::Equal,
            (DyadicDist::Zero, _) => Ordering::Less,
            (_, DyadicDist::Zero) => Ordering::Greater,
            (DyadicDist::Pow(a), DyadicDist::Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for DyadicDist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DyadicDist::Zero => f.write_str("0"),
            DyadicDist::Pow(0) => f.write_str("1"),
            DyadicDist::Pow(m) => write!(f, "2^-{m}"),
        }
    }
}

pub fn val(a: &FieldElem) -> GammaVal {
    a.valuation()
}

/// Least `m` with `X_m^{-1} <= x`, together with `2^{-m}`.
pub fn phi_index(x: &FieldElem) -> Result<(u32, DyadicDist)> {
    if x.sign() != Sign::Positive {
        return Err(Error::domain("phi is defined for positive elements only"));
    }
    let cap = x.max_var() + 1;
    let one = FieldElem::one();
    for m in 1..=cap {
        // X_m^{-1} <= x  iff  x*X_m - 1 >= 0
        if (&(x * &FieldElem::var(m)) - &one).sign() != Sign::Negative {
            return Ok((m, DyadicDist::Pow(m)));
        }
    }
    Err(Error::Internal(format!(
        "phi scan passed X{cap} without terminating"
    )))
}

pub fn dist(x: &FieldElem, y: &FieldElem) -> DyadicDist {
    if x == y {
        return DyadicDist::Zero;
    }
    phi_index(&(x - y).abs())
        .expect("a nonzero absolute value is positive")
        .1
}

/// The rational `c` with `v(a - c) < 1`, for `a` in the valuation ring.
pub fn residue(a: &FieldElem) -> Result<Coeff> {
    let v = val(a);
    match v.cmp(&GammaVal::one()) {
        Ordering::Less => Ok(Coeff::from_integer(0.into())),
        Ordering::Equal => Ok(a.num().leading_coeff() / a.den().leading_coeff()),
        Ordering::Greater => Err(Error::domain(format!(
            "not in local ring: valuation {v} exceeds 1"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ball {
    /// `{x : |x - center| < radius}`.
    OrderOpen { center: FieldElem, radius: FieldElem },
    /// `{x : v(x - center) <= radius}`.
    ValClosed { center: FieldElem, radius: GammaVal },
    /// `{x : v(x - center) < radius}`.
    ValOpen { center: FieldElem, radius: GammaVal },
}

impl Ball {
    pub fn order_open(center: FieldElem, radius: FieldElem) -> Result<Self> {
        if radius.sign() != Sign::Positive {
            return Err(Error::domain("order ball radius must be positive"));
        }
        Ok(Ball::OrderOpen { center, radius })
    }

    pub fn val_closed(center: FieldElem, radius: GammaVal) -> Result<Self> {
        if radius.is_zero() {
            return Err(Error::domain("valuation ball radius must be nonzero"));
        }
        Ok(Ball::ValClosed { center, radius })
    }

    pub fn val_open(center: FieldElem, radius: GammaVal) -> Result<Self> {
        if radius.is_zero() {
            return Err(Error::domain("valuation ball radius must be nonzero"));
        }
        Ok(Ball::ValOpen { center, radius })
    }

    pub fn center(&self) -> &FieldElem {
        match self {
            Ball::OrderOpen { center, .. }
            | Ball::ValClosed { center, .. }
            | Ball::ValOpen { center, .. } => center,
        }
    }

    pub fn contains(&self, x: &FieldElem) -> bool {
        let diff = x - self.center();
        match self {
            Ball::OrderOpen { radius, .. } => diff.abs() < *radius,
            Ball::ValClosed { radius, .. } => val(&diff) <= *radius,
            Ball::ValOpen { radius, .. } => val(&diff) < *radius,
        }
    }
}

/// `ĝ_n^{-1}`, the valuation of `X_n^{-1}`.
pub fn inv_generator(n: u32) -> GammaVal {
    GammaVal::generator_pow(n, -1)
}

/// The monomial `X^α` with valuation `g`; `None` for the zero of Γ.
pub fn monomial_with_valuation(g: &GammaVal) -> Option<FieldElem> {
    if g.is_zero() {
        return None;
    }
    let exps: Vec<(u32, i64)> = g.exponents().collect();
    Some(FieldElem::monomial(Coeff::one(), &exps))
}

/// `X_n^{-1}` as a field element.
pub fn inv_var(n: u32) -> FieldElem {
    FieldElem::var(n).inv().expect("X_n is nonzero")
}
