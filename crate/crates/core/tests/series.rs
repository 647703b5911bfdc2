mod common;

use common::*;
use kval_core::text::parse_rule;
use kval_core::valuation::{inv_generator, monomial_with_valuation};
use kval_core::{val, FieldElem, GammaVal, PowerSeries, Verdict};
use proptest::prelude::*;

fn radii() -> Vec<GammaVal> {
    vec![
        inv_generator(1),
        GammaVal::one(),
        GammaVal::generator_pow(1, 1),
        GammaVal::generator_pow(2, 1),
    ]
}

fn coeff_table(len: usize) -> impl Strategy<Value = Vec<FieldElem>> {
    proptest::collection::vec(
        prop_oneof![
            Just(FieldElem::zero()),
            laurent_monomial(2),
            field(2),
        ],
        1..=len,
    )
}

/// Coefficient list of a polynomial series in powers of `z - center`.
fn dense(s: &PowerSeries, len: usize) -> Vec<FieldElem> {
    (0..len).map(|n| s.coeff(n)).collect()
}

fn naive_product(a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let mut out = vec![FieldElem::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn maximum_principle_on_spheres(
        coeffs in coeff_table(5),
        center in prop_oneof![Just(FieldElem::zero()), laurent_monomial(2)],
        which in 0usize..4,
    ) {
        let r = radii()[which].clone();
        let f = PowerSeries::polynomial(center.clone(), coeffs.clone());
        let (norm, _) = f.sup_norm_ball(&r).unwrap();
        let unit = monomial_with_valuation(&r).unwrap();
        let mut attained = false;
        for k in 1..=10 {
            let z = &center + &unit.scale(&q(k, 1));
            prop_assert_eq!(val(&(&z - &center)), r.clone());
            let v = val(&horner(&coeffs, &(&z - &center)));
            prop_assert!(v <= norm);
            attained |= v == norm;
        }
        prop_assert!(attained);
    }

    #[test]
    fn arithmetic_agrees_with_pointwise_values(
        a in coeff_table(4),
        b in coeff_table(4),
        z in field(2),
    ) {
        let (f, g) = (series_at_zero(a.clone()), series_at_zero(b.clone()));
        let (fz, gz) = (horner(&a, &z), horner(&b, &z));
        prop_assert_eq!(f.add(&g).unwrap().eval(&z).unwrap().0, &fz + &gz);
        prop_assert_eq!(f.sub(&g).unwrap().eval(&z).unwrap().0, &fz - &gz);
        prop_assert_eq!(f.mul(&g).unwrap().eval(&z).unwrap().0, &fz * &gz);
        let n = a.len() + b.len() - 1;
        prop_assert_eq!(dense(&f.mul(&g).unwrap(), n), naive_product(&a, &b));
    }

    #[test]
    fn recentering_preserves_values(a in coeff_table(5), v in field(2), z in field(2)) {
        let f = series_at_zero(a.clone());
        let moved = f.recenter(&v).unwrap();
        prop_assert_eq!(moved.center(), &v);
        prop_assert_eq!(moved.eval(&z).unwrap().0, horner(&a, &z));
        // expanding the recentered coefficients back around zero recovers f
        let back = expand_at_zero(moved.coeffs(), &v);
        let back: Vec<FieldElem> = back.into_iter().chain(std::iter::repeat(FieldElem::zero())).take(a.len()).collect();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn derivative_is_linear_and_leibniz(a in coeff_table(4), b in coeff_table(4), k in nonzero_rational()) {
        let (f, g) = (series_at_zero(a), series_at_zero(b));
        let kf = FieldElem::from_rational(k);
        let lin = f.scalar_mul(&kf).add(&g).unwrap().derivative();
        let expect = f.derivative().scalar_mul(&kf).add(&g.derivative()).unwrap();
        prop_assert_eq!(lin, expect);
        let lhs = f.mul(&g).unwrap().derivative();
        let rhs = f.derivative().mul(&g).unwrap().add(&f.mul(&g.derivative()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_is_associative(
        a in coeff_table(3),
        b in coeff_table(3),
        d in coeff_table(3),
        order in 1usize..=6,
    ) {
        let lift = |c: Vec<FieldElem>| {
            let mut v = vec![FieldElem::zero()];
            v.extend(c);
            series_at_zero(v)
        };
        let (f, g, h) = (lift(a), lift(b), lift(d));
        let left = PowerSeries::compose(&PowerSeries::compose(&f, &g, order).unwrap().jet(order), &h, order).unwrap();
        let right = PowerSeries::compose(&f, &PowerSeries::compose(&g, &h, order).unwrap().jet(order), order).unwrap();
        prop_assert_eq!(dense(&left, order + 1), dense(&right, order + 1));
    }

    #[test]
    fn polynomials_always_converge(a in coeff_table(6), depth in 1u32..=8) {
        let f = series_at_zero(a);
        prop_assert!(f.convergence_check(depth).unwrap().converges());
    }

    #[test]
    fn verdicts_are_stable_under_deeper_checks(
        base in 1u32..=4,
        other in 1u32..=4,
        k in -2i64..=2,
        slope in prop_oneof![Just(-1i64), Just(1i64)],
        depth in 1u32..=5,
    ) {
        let text = format!("g{base}^({slope}*n)*g{other}^{k}");
        let rule = parse_rule(&text).unwrap();
        let f = PowerSeries::with_bound(FieldElem::zero(), vec![FieldElem::zero()], rule.clone(), vec![]).unwrap();
        let shallow = f.convergence_check(depth).unwrap();
        let deep = f.convergence_check(depth + 2).unwrap();
        match (&shallow, &deep) {
            (Verdict::DivergesAt { .. }, _) => prop_assert_eq!(&shallow, &deep),
            (Verdict::Converges { schedule: s }, Verdict::Converges { schedule: t }) => {
                prop_assert_eq!(&s[..], &t[..s.len()]);
            }
            (Verdict::Converges { .. }, Verdict::DivergesAt { m, .. }) => prop_assert!(*m > depth),
        }
        // every promised index really is below the level, checked on the rule itself
        if let Verdict::Converges { schedule } = &deep {
            for (i, n0) in schedule.iter().enumerate() {
                let level = inv_generator(i as u32 + 1);
                for n in (*n0).max(1)..n0 + 25 {
                    prop_assert!(rule.eval(n).unwrap() < level);
                }
            }
        }
    }

    #[test]
    fn liouville_witness_escapes_every_bound(a in coeff_table(4), r in gamma(3)) {
        let mut coeffs = a;
        coeffs.push(FieldElem::one());
        let f = series_at_zero(coeffs.clone());
        let z = f.unboundedness_witness(&r).unwrap();
        let v = val(&(&horner(&coeffs, &z) - &coeffs[0]));
        prop_assert!(v > r);
    }
}
