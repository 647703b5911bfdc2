//! Shared inputs for the criterion benchmarks.

use kval_core::{FieldElem, PowerSeries};

/// `(X_1 + X_2 + 1)^k / (X_1 - X_2)^k`, a rational function with a large reduced form.
pub fn dense_fraction(k: u32) -> FieldElem {
    let num = &(&FieldElem::var(1) + &FieldElem::var(2)) + &FieldElem::one();
    let den = &FieldElem::var(1) - &FieldElem::var(2);
    num.powu(k).div(&den.powu(k)).expect("nonzero denominator")
}

/// Terms `1/X_1, …, 1/X_k`, summed pairwise in the benchmarks.
pub fn reciprocals(k: u32) -> Vec<FieldElem> {
    (1..=k).map(|n| FieldElem::var(n).inv().expect("nonzero")).collect()
}

/// `Σ_{n<len} (X_1 + n)/X_2^n z^n` around zero.
pub fn series(len: usize) -> PowerSeries {
    let coeffs = (0..len)
        .map(|n| {
            let c = &FieldElem::var(1) + &FieldElem::from_int(n as i64);
            c.div(&FieldElem::var(2).powu(n as u32)).expect("nonzero")
        })
        .collect();
    PowerSeries::polynomial(FieldElem::zero(), coeffs)
}

/// `z + z^2`, inverted around zero.
pub fn catalan_map() -> PowerSeries {
    PowerSeries::polynomial(
        FieldElem::zero(),
        vec![FieldElem::zero(), FieldElem::one(), FieldElem::one()],
    )
}

/// `z^3/3 - X_1 z`.
pub fn cubic() -> PowerSeries {
    PowerSeries::polynomial(
        FieldElem::zero(),
        vec![
            FieldElem::zero(),
            -FieldElem::var(1),
            FieldElem::zero(),
            FieldElem::from_ratio(1, 3),
        ],
    )
}
