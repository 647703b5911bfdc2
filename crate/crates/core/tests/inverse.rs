mod common;

use common::*;
use kval_core::series::agree_through;
use kval_core::{
    compose_residual, divided_difference_expansion, inversion_domain, picard_invert,
    series_reversion_oracle, Error, FieldElem, PowerSeries,
};
use proptest::prelude::*;

fn inversion_input() -> impl Strategy<Value = (Vec<FieldElem>, FieldElem)> {
    (
        proptest::collection::vec(inversion_coeff(), 2..=6),
        prop_oneof![Just(FieldElem::zero()), Just(c(1)), Just(xinv(1))],
    )
}

/// Newton iteration on truncated power series: an independent reversion
/// that doubles the number of correct coefficients per round.
fn newton_reversion(a: &[FieldElem], x0: &FieldElem, order: usize) -> Vec<FieldElem> {
    let shifted = expand_at_zero(a, &(-x0));
    let da: Vec<FieldElem> = shifted
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| c.scale(&q(n as i64, 1)))
        .collect();
    let y0 = shifted[0].clone();
    // g = x0 + h(y - y0); work with h as coefficients in t = y - y0
    let mut h = vec![FieldElem::zero(), shifted[1].inv().unwrap()];
    let mut prec = 1;
    while prec < order {
        prec = (2 * prec).min(order);
        h.resize(prec + 1, FieldElem::zero());
        let fh = compose_trunc(&shifted, &h, prec);
        let dfh = compose_trunc(&da, &h, prec);
        // residual f(x0 + h) - (y0 + t)
        let mut r = fh;
        r[0] = &r[0] - &y0;
        r[1] = &r[1] - &FieldElem::one();
        let step = mul_trunc(&r, &inverse_trunc(&dfh, prec), prec);
        for (k, s) in step.iter().enumerate() {
            h[k] = &h[k] - s;
        }
    }
    h.truncate(order + 1);
    h.resize(order + 1, FieldElem::zero());
    h.remove(0);
    h
}

fn mul_trunc(p: &[FieldElem], q: &[FieldElem], n: usize) -> Vec<FieldElem> {
    let mut out = vec![FieldElem::zero(); n + 1];
    for (i, a) in p.iter().enumerate().take(n + 1) {
        for (j, b) in q.iter().enumerate().take(n + 1 - i) {
            out[i + j] = &out[i + j] + &(a * b);
        }
    }
    out
}

fn compose_trunc(outer: &[FieldElem], inner: &[FieldElem], n: usize) -> Vec<FieldElem> {
    let mut acc = vec![FieldElem::zero(); n + 1];
    for c in outer.iter().rev() {
        acc = mul_trunc(&acc, inner, n);
        acc[0] = &acc[0] + c;
    }
    acc
}

fn inverse_trunc(p: &[FieldElem], n: usize) -> Vec<FieldElem> {
    let p0 = p[0].inv().unwrap();
    let mut out = vec![FieldElem::zero(); n + 1];
    out[0] = p0.clone();
    for k in 1..=n {
        let mut acc = FieldElem::zero();
        for j in 1..=k.min(p.len() - 1) {
            acc = &acc + &(&p[j] * &out[k - j]);
        }
        out[k] = -&(&acc * &p0);
    }
    out
}

fn run(a: &[FieldElem], x0: &FieldElem, order: usize) -> Option<(PowerSeries, kval_core::InversionCertificate)> {
    let f = series_at_zero(a.to_vec());
    match picard_invert(&f, x0, order) {
        Ok(out) => Some(out),
        Err(Error::Pivot(_)) | Err(Error::Depth(_)) => None,
        Err(e) => panic!("unexpected failure: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn picard_agrees_with_both_oracles((a, x0) in inversion_input(), order in 1usize..=5) {
        let Some((g, cert)) = run(&a, &x0, order) else { return Ok(()) };
        let f = series_at_zero(a.clone());
        let oracle = series_reversion_oracle(&f, &x0, order).unwrap();
        let got: Vec<FieldElem> = (1..=order).map(|n| g.coeff(n)).collect();
        prop_assert_eq!(&got, &oracle);
        prop_assert_eq!(&got, &newton_reversion(&a, &x0, order));
        prop_assert_eq!(g.coeff(0), x0.clone());
        prop_assert!(cert.residual_is_zero());
        prop_assert!(cert.stabilized_at <= order + 2);
    }

    #[test]
    fn iteration_contracts_and_stays_in_the_domain((a, x0) in inversion_input(), order in 1usize..=5) {
        let Some((g, cert)) = run(&a, &x0, order) else { return Ok(()) };
        let d = &cert.domain;
        prop_assert!(!d.s.is_zero());
        prop_assert!(d.spread < &kval_core::valuation::inv_generator(1) * &kval_core::val(&d.s));
        prop_assert!(d.delta <= d.r1.clone().min(&kval_core::val(&d.s) * &d.r1));
        prop_assert!(cert.gamma_contraction_holds());
        prop_assert!(cert.well_defined());
        // the upper d_1 bound never grows from one step to the next
        for w in cert.steps.windows(2) {
            prop_assert!(w[1].bracket.upper <= w[0].bracket.upper);
        }
        // ψ_k is correct through order k - 1
        for (k, psi) in cert.iterates.iter().enumerate() {
            if k >= 1 {
                prop_assert!(agree_through(psi, &g, (k - 1).min(order)));
            }
        }
    }

    #[test]
    fn inverse_is_two_sided(mut a in proptest::collection::vec(inversion_coeff(), 2..=5), order in 1usize..=5) {
        a[0] = FieldElem::zero();
        let Some((g, _)) = run(&a, &FieldElem::zero(), order) else { return Ok(()) };
        let f = series_at_zero(a);
        // g(f(z)) - z, with f as the inner series
        let back = PowerSeries::compose(&g, &f, order).unwrap();
        prop_assert!(back.coeff(0).is_zero());
        prop_assert!(back.coeff(1).is_one());
        for n in 2..=order {
            prop_assert!(back.coeff(n).is_zero());
        }
        prop_assert!(compose_residual(&f, &g, order).unwrap().coeffs().iter().all(FieldElem::is_zero));
    }

    #[test]
    fn divided_differences_reproduce_the_slope(a in proptest::collection::vec(inversion_coeff(), 2..=6), x0 in field(2), h in nonzero_field(2), k in nonzero_field(2)) {
        prop_assume!(h != k);
        let f = series_at_zero(a.clone());
        let dd = divided_difference_expansion(&f, &x0).unwrap();
        // Σ c_jk h^j k^k + s = (f(x0+h) - f(x0+k)) / (h - k)
        let mut lhs = dd.s.clone();
        for (j, row) in dd.coeffs.iter().enumerate() {
            for (l, cjl) in row.iter().enumerate() {
                lhs = &lhs + &(&(cjl * &h.powu(j as u32)) * &k.powu(l as u32));
            }
        }
        let rhs = (&horner(&a, &(&x0 + &h)) - &horner(&a, &(&x0 + &k))).div(&(&h - &k)).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(dd.coeff(0, 0).is_zero());
    }

    #[test]
    fn pivot_errors_exactly_at_critical_points(a in proptest::collection::vec(inversion_coeff(), 2..=5)) {
        let f = series_at_zero(a.clone());
        let critical = a[1].is_zero();
        let res = inversion_domain(&f, &FieldElem::zero());
        prop_assert_eq!(matches!(res, Err(Error::Pivot(_))), critical);
    }
}
