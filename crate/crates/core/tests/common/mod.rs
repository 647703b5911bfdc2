#![allow(dead_code)]

use kval_core::{Coeff, FieldElem, GammaVal, Monomial, Poly, PowerSeries};
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn c(n: i64) -> FieldElem {
    FieldElem::from_int(n)
}

pub fn q(a: i64, b: i64) -> Coeff {
    Coeff::new(BigInt::from(a), BigInt::from(b))
}

pub fn x(n: u32) -> FieldElem {
    FieldElem::var(n)
}

pub fn xinv(n: u32) -> FieldElem {
    FieldElem::var(n).inv().unwrap()
}

pub fn rational() -> impl Strategy<Value = Coeff> {
    (-9i64..=9, 1i64..=5).prop_map(|(a, b)| q(a, b))
}

pub fn nonzero_rational() -> impl Strategy<Value = Coeff> {
    (1i64..=9, 1i64..=5, any::<bool>()).prop_map(|(a, b, neg)| q(if neg { -a } else { a }, b))
}

/// Polynomial in `X_1..X_vars` with up to `terms` terms of degree at most 2 per variable.
pub fn poly(vars: u32, terms: usize) -> impl Strategy<Value = Poly> {
    proptest::collection::vec(
        (nonzero_rational(), proptest::collection::vec(0u32..=2, vars as usize)),
        1..=terms,
    )
    .prop_map(|ts| Poly::from_terms(ts.into_iter().map(|(c, e)| (Monomial::from_exponents(e), c))))
}

pub fn field(vars: u32) -> impl Strategy<Value = FieldElem> {
    (poly(vars, 3), poly(vars, 2)).prop_map(|(n, d)| {
        if d.is_zero() {
            FieldElem::from_poly(n)
        } else {
            FieldElem::new(n, d).unwrap()
        }
    })
}

pub fn nonzero_field(vars: u32) -> impl Strategy<Value = FieldElem> {
    field(vars).prop_filter("nonzero", |a| !a.is_zero())
}

/// Elements of the valuation ring: anything of value above `1` is replaced by its inverse.
pub fn local_field(vars: u32) -> impl Strategy<Value = FieldElem> {
    field(vars).prop_map(|a| {
        if kval_core::val(&a) > GammaVal::one() {
            a.inv().expect("nonzero")
        } else {
            a
        }
    })
}

/// `c·X^α` with exponents in `-3..=3`.
pub fn laurent_monomial(vars: u32) -> impl Strategy<Value = FieldElem> {
    (nonzero_rational(), proptest::collection::vec(-3i64..=3, vars as usize)).prop_map(|(c, e)| {
        let exps: Vec<(u32, i64)> = e.iter().enumerate().map(|(i, k)| (i as u32 + 1, *k)).collect();
        FieldElem::monomial(c, &exps)
    })
}

pub fn positive_monomial(vars: u32) -> impl Strategy<Value = FieldElem> {
    laurent_monomial(vars).prop_map(|m| m.abs())
}

pub fn gamma(vars: u32) -> impl Strategy<Value = GammaVal> {
    proptest::collection::vec(-4i64..=4, vars as usize).prop_map(|v| GammaVal::from_list(&v))
}

/// Coefficients from rationals, rationals·X_1^{±1} and X_2^{±1}.
pub fn inversion_coeff() -> impl Strategy<Value = FieldElem> {
    prop_oneof![
        rational().prop_map(FieldElem::from_rational),
        (nonzero_rational(), prop_oneof![Just(1i64), Just(-1i64)])
            .prop_map(|(c, e)| FieldElem::monomial(c, &[(1, e)])),
        prop_oneof![Just(1i64), Just(-1i64)].prop_map(|e| FieldElem::monomial(q(1, 1), &[(2, e)])),
    ]
}

pub fn series_at_zero(coeffs: Vec<FieldElem>) -> PowerSeries {
    PowerSeries::polynomial(FieldElem::zero(), coeffs)
}

/// Coefficients of `Σ b_n (z - u)^n` in powers of `z`, by repeated
/// multiplication with `(z - u)`.
pub fn expand_at_zero(b: &[FieldElem], u: &FieldElem) -> Vec<FieldElem> {
    let mut out = vec![FieldElem::zero(); b.len()];
    let mut power = vec![FieldElem::one()];
    for bn in b {
        for (i, p) in power.iter().enumerate() {
            out[i] = &out[i] + &(bn * p);
        }
        let mut next = vec![FieldElem::zero(); power.len() + 1];
        for (i, p) in power.iter().enumerate() {
            next[i + 1] = &next[i + 1] + p;
            next[i] = &next[i] - &(p * u);
        }
        power = next;
    }
    out
}

/// Horner evaluation of `Σ a_n z^n`.
pub fn horner(a: &[FieldElem], z: &FieldElem) -> FieldElem {
    a.iter().rev().fold(FieldElem::zero(), |acc, c| &(&acc * z) + c)
}
