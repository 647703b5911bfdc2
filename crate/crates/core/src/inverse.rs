//! Local inversion of analytic functions by fixed-point iteration, with the
//! domain radii, per-step contraction records and an independent reversion
//! oracle.

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::gamma::GammaVal;
use crate::series::{dist_bracket_for_norm, DistBracket, PowerSeries};
use crate::valuation::{inv_generator, val};

/// Largest generator index in the radius grid.
pub const GRID_MAX_INDEX: u32 = 4;
/// Largest exponent in the radius grid.
pub const GRID_MAX_EXPONENT: i64 = 8;

/// Coefficients `c_{jk}` of `(f(x) - f(x'))/(x - x') - s` in powers of
/// `(x - x_0)^j (x' - x_0)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DividedDifference {
    pub center: FieldElem,
    pub s: FieldElem,
    /// Square table; `coeffs[j][k]` vanishes once `j + k + 1` exceeds the degree.
    pub coeffs: Vec<Vec<FieldElem>>,
}

impl DividedDifference {
    pub fn coeff(&self, j: usize, k: usize) -> FieldElem {
        self.coeffs
            .get(j)
            .and_then(|row| row.get(k))
            .cloned()
            .unwrap_or_else(FieldElem::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(FieldElem::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversionDomain {
    pub x0: FieldElem,
    pub y0: FieldElem,
    pub s: FieldElem,
    pub r1: GammaVal,
    pub delta: GammaVal,
    /// `max_{j+k>=1} v(c_{jk}) r_1^{j+k}`, strictly below `ĝ_1^{-1} v(s)`.
    pub spread: GammaVal,
}

/// One application of the fixed-point map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    /// `‖ψ_{k+1} - ψ_k‖_∞` on the closed ball of radius δ.
    pub diff_norm: GammaVal,
    pub bracket: DistBracket,
    /// `‖ψ_{k+1} - x_0‖_∞` on the same ball.
    pub image_norm: GammaVal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversionCertificate {
    pub domain: InversionDomain,
    pub order: usize,
    /// Set when `f` carried an uncertainty bound and only its exact
    /// coefficients through this order were used.
    pub truncated_at: Option<usize>,
    /// `ψ_0, ψ_1, …`; the last two agree.
    pub iterates: Vec<PowerSeries>,
    /// `steps[k]` compares `ψ_{k+1}` with `ψ_k`.
    pub steps: Vec<StepRecord>,
    /// Least `k` with `ψ_{k+1} = ψ_k`.
    pub stabilized_at: usize,
    /// Coefficients `0..=N` of `f(g(y)) - y`.
    pub residual: Vec<FieldElem>,
}

impl InversionCertificate {
    pub fn residual_is_zero(&self) -> bool {
        self.residual.iter().all(FieldElem::is_zero)
    }

    /// `‖Δ_{k+1}‖ <= ĝ_1^{-1} ‖Δ_k‖` for every consecutive pair of nonzero differences.
    pub fn gamma_contraction_holds(&self) -> bool {
        let factor = inv_generator(1);
        self.steps.windows(2).all(|w| {
            w[1].diff_norm.is_zero() || w[1].diff_norm <= &factor * &w[0].diff_norm
        })
    }

    /// The upper `d_1` bracket at least halves from one nonzero difference to the next.
    pub fn d1_halving_holds(&self) -> bool {
        self.steps.windows(2).all(|w| {
            if w[1].diff_norm.is_zero() {
                return true;
            }
            match (w[0].bracket.upper.exponent(), w[1].bracket.upper.exponent()) {
                (Some(a), Some(b)) => b > a,
                _ => false,
            }
        })
    }

    /// Every iterate maps the δ-ball into the `r_1`-ball around `x_0`.
    pub fn well_defined(&self) -> bool {
        self.steps.iter().all(|s| s.image_norm <= self.domain.r1)
    }
}

/// The series around `x0` with exactly known coefficients through `order`
/// (all of them for exact input).
fn local_expansion(
    f: &PowerSeries,
    x0: &FieldElem,
    order: Option<usize>,
) -> Result<(PowerSeries, Option<usize>)> {
    if f.is_polynomial() {
        return Ok((f.recenter(x0)?, None));
    }
    let exact_through = |n: usize| {
        f.center() == x0 && n < f.len() && f.error_profile().head[..=n].iter().all(GammaVal::is_zero)
    };
    match order {
        Some(n) if exact_through(n) => Ok((f.jet(n), Some(n))),
        _ => Err(Error::Composition(
            "inversion needs exactly known coefficients at x0 through the requested order; \
             expand around x0 with enough stored terms"
                .into(),
        )),
    }
}

pub fn divided_difference_expansion(f: &PowerSeries, x0: &FieldElem) -> Result<DividedDifference> {
    let (b, _) = local_expansion(f, x0, None)?;
    let deg = b.len() - 1;
    let mut coeffs = vec![vec![FieldElem::zero(); deg]; deg];
    for (j, row) in coeffs.iter_mut().enumerate() {
        for (k, c) in row.iter_mut().enumerate() {
            if j + k >= 1 {
                *c = b.coeff(j + k + 1);
            }
        }
    }
    Ok(DividedDifference {
        center: x0.clone(),
        s: b.coeff(1),
        coeffs,
    })
}

/// Candidate radii, largest first.
pub fn radius_grid() -> Vec<GammaVal> {
    let mut grid = vec![GammaVal::one()];
    for m in 1..=GRID_MAX_INDEX {
        for t in 1..=GRID_MAX_EXPONENT {
            grid.push(GammaVal::generator_pow(m, -t));
        }
    }
    grid.sort_by(|a, b| b.cmp(a));
    grid
}

pub fn inversion_domain(f: &PowerSeries, x0: &FieldElem) -> Result<InversionDomain> {
    let b = f.recenter(x0)?;
    let s = b.coeff(1);
    let pivot_bound = b.error_profile().at(1)?;
    if s.is_zero() || (!pivot_bound.is_zero() && val(&s) <= pivot_bound) {
        return Err(Error::Pivot(format!("f'({x0}) vanishes or is not determined")));
    }
    let target = &inv_generator(1) * &val(&s);
    let profile = b.coefficient_profile();
    for r in radius_grid() {
        // max_{n>=2} v(a_n) r^{n-1}, i.e. max over j+k >= 1 of v(c_{jk}) r^{j+k}
        let spread = &profile.geometric(&r).sup_from(2)? * &r.inv()?;
        if spread < target {
            let delta = r.clone().min(&val(&s) * &r);
            return Ok(InversionDomain {
                x0: x0.clone(),
                y0: b.coeff(0),
                s,
                r1: r,
                delta,
                spread,
            });
        }
    }
    Err(Error::Depth(format!(
        "no radius in the grid up to ĝ_{GRID_MAX_INDEX}^-{GRID_MAX_EXPONENT} meets the contraction condition"
    )))
}

/// Runs `ψ ↦ ψ - s^{-1}(f∘ψ - y)` from `ψ_0 = x_0` on jets of order `N`
/// until it stabilizes, and certifies the result.
pub fn picard_invert(
    f: &PowerSeries,
    x0: &FieldElem,
    order: usize,
) -> Result<(PowerSeries, InversionCertificate)> {
    let domain = inversion_domain(f, x0)?;
    let (fx, truncated_at) = local_expansion(f, x0, Some(order))?;
    let fx = fx.jet(order);
    let y0 = domain.y0.clone();
    let s_inv = domain.s.inv()?;
    let identity = PowerSeries::identity(y0.clone());
    let mut iterates = vec![PowerSeries::constant(y0.clone(), x0.clone())];
    let mut steps = Vec::new();
    let cap = order + 2;
    let stabilized_at = loop {
        let k = iterates.len() - 1;
        if k > cap {
            return Err(Error::Internal(format!(
                "fixed-point iteration did not stabilize within {cap} steps"
            )));
        }
        let psi = &iterates[k];
        let composed = PowerSeries::compose_jet(&fx, psi, Some(order));
        let correction = composed.sub(&identity)?.scalar_mul(&s_inv);
        let next = psi.sub(&correction)?.jet(order);
        let (diff_norm, _) = next.sub(psi)?.sup_norm_ball(&domain.delta)?;
        let moved = PowerSeries::constant(y0.clone(), x0.clone());
        let (image_norm, _) = next.sub(&moved)?.sup_norm_ball(&domain.delta)?;
        steps.push(StepRecord {
            bracket: dist_bracket_for_norm(diff_norm.clone()),
            diff_norm,
            image_norm,
        });
        let done = next == *psi;
        iterates.push(next);
        if done {
            break k;
        }
    };
    let g = iterates.last().cloned().expect("at least one iterate");
    let residual_series = compose_residual(&fx, &g, order)?;
    let residual = (0..=order).map(|n| residual_series.coeff(n)).collect();
    Ok((
        g,
        InversionCertificate {
            domain,
            order,
            truncated_at,
            iterates,
            steps,
            stabilized_at,
            residual,
        },
    ))
}

/// `f(g(y)) - y` through order `N`.
pub fn compose_residual(f: &PowerSeries, g: &PowerSeries, order: usize) -> Result<PowerSeries> {
    let (fx, _) = local_expansion(f, &g.coeff(0), Some(order))?;
    let composed = PowerSeries::compose(&fx.jet(order), g, order)?.jet(order);
    Ok(composed
        .sub(&PowerSeries::identity(g.center().clone()))?
        .jet(order))
}

/// `b_1, …, b_N` with `f(x_0 + Σ b_n (y - y_0)^n) = y` through order `N`,
/// by solving the triangular system one order at a time.
pub fn series_reversion_oracle(f: &PowerSeries, x0: &FieldElem, order: usize) -> Result<Vec<FieldElem>> {
    let a = if f.is_polynomial() {
        taylor_shift(f.coeffs(), &(x0 - f.center()))
    } else if f.center() == x0
        && order < f.len()
        && f.error_profile().head[..=order].iter().all(GammaVal::is_zero)
    {
        f.coeffs()[..=order].to_vec()
    } else {
        return Err(Error::Composition(
            "reversion needs exactly known coefficients at x0 through the requested order".into(),
        ));
    };
    let coeff = |k: usize| a.get(k).cloned().unwrap_or_else(FieldElem::zero);
    let a1 = coeff(1);
    if a1.is_zero() {
        return Err(Error::Pivot(format!("f'({x0}) = 0")));
    }
    // b[0] = 0 stands for the constant term of g - x_0.
    let mut b = vec![FieldElem::zero(); order + 1];
    for n in 1..=order {
        // [y^n] of Σ_{k>=2} a_k (g - x_0)^k uses only b_1..b_{n-1}.
        let mut higher = FieldElem::zero();
        let mut power = b.clone();
        for k in 2..=n.min(a.len().saturating_sub(1)) {
            power = truncated_product(&power, &b, order);
            let ak = coeff(k);
            if !ak.is_zero() {
                higher = &higher + &(&ak * &power[n]);
            }
        }
        let rhs = if n == 1 { FieldElem::one() } else { FieldElem::zero() };
        b[n] = (&rhs - &higher).div(&a1)?;
    }
    b.remove(0);
    Ok(b)
}

/// Coefficients of `Σ a_k (u + h)^k` in powers of `h`, by Horner's rule.
fn taylor_shift(a: &[FieldElem], u: &FieldElem) -> Vec<FieldElem> {
    let mut acc: Vec<FieldElem> = Vec::new();
    for ak in a.iter().rev() {
        let mut next = vec![FieldElem::zero(); acc.len() + 1];
        for (i, c) in acc.iter().enumerate() {
            next[i] = &next[i] + &(c * u);
            next[i + 1] = &next[i + 1] + c;
        }
        next[0] = &next[0] + ak;
        acc = next;
    }
    acc
}

fn truncated_product(p: &[FieldElem], q: &[FieldElem], order: usize) -> Vec<FieldElem> {
    let mut out = vec![FieldElem::zero(); order + 1];
    for (i, x) in p.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in q.iter().enumerate().take(order + 1 - i.min(order + 1)) {
            if !y.is_zero() && i + j <= order {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Coeff;
    use crate::valuation::inv_var;

    fn x(n: u32) -> FieldElem {
        FieldElem::var(n)
    }

    fn c(n: i64) -> FieldElem {
        FieldElem::from_int(n)
    }

    fn poly(coeffs: Vec<FieldElem>) -> PowerSeries {
        PowerSeries::polynomial(FieldElem::zero(), coeffs)
    }

    fn quad() -> PowerSeries {
        poly(vec![c(0), c(1), c(1)])
    }

    fn affine() -> PowerSeries {
        poly(vec![c(1), c(2)])
    }

    fn cubic() -> PowerSeries {
        poly(vec![c(0), -x(1), c(0), FieldElem::from_ratio(1, 3)])
    }

    #[test]
    fn divided_differences() {
        let d = divided_difference_expansion(&quad(), &c(0)).unwrap();
        assert_eq!(d.coeff(0, 0), c(0));
        assert_eq!((d.coeff(1, 0), d.coeff(0, 1)), (c(1), c(1)));
        assert!(divided_difference_expansion(&affine(), &c(0)).unwrap().is_zero());
        let d = divided_difference_expansion(&cubic(), &c(0)).unwrap();
        let third = FieldElem::from_ratio(1, 3);
        assert_eq!(d.coeff(2, 0), third);
        assert_eq!(d.coeff(1, 1), third);
        assert_eq!(d.coeff(0, 2), third);
        assert_eq!(d.coeff(1, 0), c(0));
    }

    #[test]
    fn domains() {
        let d = inversion_domain(&quad(), &c(0)).unwrap();
        assert_eq!(d.s, c(1));
        assert_eq!(d.r1, GammaVal::generator_pow(1, -2));
        assert_eq!(d.delta, GammaVal::generator_pow(1, -2));
        let d = inversion_domain(&affine(), &c(0)).unwrap();
        assert_eq!((d.r1.clone(), d.delta.clone()), (GammaVal::one(), GammaVal::one()));
        let d = inversion_domain(&cubic(), &c(0)).unwrap();
        assert_eq!(d.s, -x(1));
        assert_eq!(d.r1, inv_generator(1));
        // min(r_1, v(s) r_1) = min(ĝ_1^{-1}, 1)
        assert_eq!(d.delta, inv_generator(1));
        let flat = poly(vec![c(0), c(0), c(1)]);
        assert!(matches!(inversion_domain(&flat, &c(0)), Err(Error::Pivot(_))));
    }

    #[test]
    fn affine_inverse() {
        let (g, cert) = picard_invert(&affine(), &c(0), 3).unwrap();
        assert_eq!(crate::text::print_series_expr(&g, "y"), "1/2*(y - 1)");
        assert_eq!(cert.stabilized_at, 1);
        assert!(cert.residual_is_zero());
    }

    #[test]
    fn catalan_inverse() {
        let (g, cert) = picard_invert(&quad(), &c(0), 5).unwrap();
        assert_eq!(
            crate::text::print_series_expr(&g, "y"),
            "y - y^2 + 2*y^3 - 5*y^4 + 14*y^5"
        );
        assert!(cert.residual_is_zero());
        assert!(cert.gamma_contraction_holds());
        assert!(cert.well_defined());
        assert!(cert.stabilized_at <= 7);
        let oracle = series_reversion_oracle(&quad(), &c(0), 5).unwrap();
        assert_eq!(oracle, vec![c(1), c(-1), c(2), c(-5), c(14)]);
    }

    #[test]
    fn cubic_inverse() {
        let (g, cert) = picard_invert(&cubic(), &c(0), 3).unwrap();
        assert_eq!(g.coeff(1), -inv_var(1));
        assert_eq!(g.coeff(2), c(0));
        assert_eq!(g.coeff(3), -&inv_var(1).powu(4).scale(&Coeff::new(1.into(), 3.into())));
        assert!(cert.residual_is_zero());
        let oracle = series_reversion_oracle(&cubic(), &c(0), 3).unwrap();
        assert_eq!(oracle, g.coeffs()[1..].to_vec());
    }

    #[test]
    fn residuals() {
        let g = PowerSeries::polynomial(c(1), vec![c(0), FieldElem::from_ratio(1, 2)]);
        let r = compose_residual(&affine(), &g, 4).unwrap();
        assert!(r.coeffs().iter().all(FieldElem::is_zero));
        let wrong = PowerSeries::identity(c(0));
        let r = compose_residual(&quad(), &wrong, 4).unwrap();
        assert_eq!(r.coeffs(), &[c(0), c(0), c(1)]);
    }

    #[test]
    fn shifted_center() {
        // z + z^2 around x_0 = 1 has y_0 = 2 and s = 3
        let (g, cert) = picard_invert(&quad(), &c(1), 4).unwrap();
        assert_eq!(g.center(), &c(2));
        assert_eq!(g.coeff(0), c(1));
        assert!(cert.residual_is_zero());
        let oracle = series_reversion_oracle(&quad(), &c(1), 4).unwrap();
        assert_eq!(oracle, g.coeffs()[1..].to_vec());
    }
}
