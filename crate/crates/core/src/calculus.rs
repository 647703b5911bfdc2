//! Local behaviour of analytic functions: the first nonvanishing derivative,
//! extremum classification with an explicit neighbourhood, and monotonicity
//! certificates through residue polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::gamma::GammaVal;
use crate::poly::{Coeff, Sign};
use crate::series::PowerSeries;
use crate::sturm::{nonnegative_on, NonnegReport, QPoly};
use crate::valuation::{inv_var, monomial_with_valuation, residue, val};

/// Outcome of scanning for the least `n >= 1` with `f^{(n)}(x_0) != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderSearch {
    Found(usize),
    NotFoundWithinCap,
    /// The coefficient at this order is hidden by the uncertainty bound.
    Undetermined(usize),
}

/// Sign of a stored value once the unknown remainder, of valuation at most
/// `bound`, is accounted for.
fn decided_sign(value: &FieldElem, bound: &GammaVal) -> Result<Sign> {
    if bound.is_zero() || val(value) > *bound {
        return Ok(value.sign());
    }
    Err(Error::Depth(format!(
        "sign of {value} is not decided: the remainder may reach valuation {bound}"
    )))
}

pub fn first_nonvanishing_order(f: &PowerSeries, x0: &FieldElem, cap: usize) -> Result<OrderSearch> {
    let b = f.recenter(x0)?;
    let err = b.error_profile();
    for n in 1..=cap {
        let bound = err.at(n as u64)?;
        let stored = b.coeff(n);
        if !bound.is_zero() && val(&stored) <= bound {
            return Ok(OrderSearch::Undetermined(n));
        }
        if !stored.is_zero() {
            return Ok(OrderSearch::Found(n));
        }
    }
    Ok(OrderSearch::NotFoundWithinCap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumVerdict {
    Min,
    Max,
    NotExtremum,
}

impl fmt::Display for ExtremumVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremumVerdict::Min => "min",
            ExtremumVerdict::Max => "max",
            ExtremumVerdict::NotExtremum => "not an extremum",
        })
    }
}

/// `f(x_0 + h) - f(x_0)` at one probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSample {
    pub h: FieldElem,
    pub sign: Sign,
    /// Sign of `f^{(m)}(x_0) h^m / m!`.
    pub predicted: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremumReport {
    pub m: usize,
    pub verdict: ExtremumVerdict,
    /// `f^{(m)}(x_0) / m!`.
    pub leading: FieldElem,
    /// Strict upper bound for `v(f^{(n)}(x_0)/n!)`, `n >= m`.
    pub g: GammaVal,
    pub g1: GammaVal,
    pub g2: GammaVal,
    /// Every `0 < |h| < δ` gives `f(x_0+h) - f(x_0)` the sign of the leading term.
    pub delta: FieldElem,
    pub samples: Vec<SignSample>,
}

/// Number of scales `X_k^{-1}` probed on each side of `x_0`.
pub const SAMPLE_SCALES: u32 = 4;

pub fn classify_extremum(f: &PowerSeries, x0: &FieldElem) -> Result<ExtremumReport> {
    let b = f.recenter(x0)?;
    let m = match first_nonvanishing_order(f, x0, b.len().max(2))? {
        OrderSearch::Found(m) => m,
        OrderSearch::NotFoundWithinCap => {
            return Err(Error::domain("a constant function has no extremum classification"))
        }
        OrderSearch::Undetermined(n) => {
            return Err(Error::Depth(format!(
                "coefficient {n} at {x0} is hidden by the uncertainty bound"
            )))
        }
    };
    let leading = b.coeff(m);
    let lead_sign = leading.sign();
    let verdict = match (m % 2, lead_sign) {
        (0, Sign::Positive) => ExtremumVerdict::Min,
        (0, _) => ExtremumVerdict::Max,
        _ => ExtremumVerdict::NotExtremum,
    };

    let g1_hat = GammaVal::generator(1);
    let tail_sup = b.coefficient_profile().sup_from(m)?;
    let g = &g1_hat * &tail_sup;
    let g1 = &g1_hat * &g.inv()?;
    let g2 = &(&g1_hat * &g) * &val(&leading).inv()?;
    let cap = g1.inv()?.min(g2.inv()?).min(GammaVal::one());
    let delta_val = &g1_hat.inv()? * &cap;
    let delta = monomial_with_valuation(&delta_val).expect("nonzero valuation");

    let mut samples = Vec::new();
    for k in 1..=SAMPLE_SCALES {
        let step = &delta * &inv_var(k);
        for h in [step.clone(), -step] {
            let sign = increment_sign(&b, &h)?;
            let h_sign = if m % 2 == 1 { h.sign() } else { Sign::Positive };
            samples.push(SignSample {
                h,
                sign,
                predicted: lead_sign.times(h_sign),
            });
        }
    }
    Ok(ExtremumReport {
        m,
        verdict,
        leading,
        g,
        g1,
        g2,
        delta,
        samples,
    })
}

/// Exact sign of `Σ_{n>=1} b_n h^n` for a series `b` centered at `x_0`.
fn increment_sign(b: &PowerSeries, h: &FieldElem) -> Result<Sign> {
    let mut value = FieldElem::zero();
    for a in b.coeffs().iter().skip(1).rev() {
        value = &(&value + a) * h;
    }
    let bound = if b.is_polynomial() {
        GammaVal::zero()
    } else {
        b.error_profile().geometric(&val(h)).sup_from(1)?
    };
    decided_sign(&value, &bound)
}

/// Appears in every rendered monotonicity certificate.
pub const MONOTONE_NOTE: &str = "this certifies the residue-polynomial argument plus finite probing \
of f'; it is not a decision procedure for f' > 0 on the whole interval";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneCertificate {
    pub a: FieldElem,
    pub b: FieldElem,
    /// Coefficients of `F(x) = f((b-a)x + a) - f(a)`.
    pub rescaled: Vec<FieldElem>,
    /// Monomial `c` with `max_j v(c·F_j) = 1`.
    pub normalization: FieldElem,
    pub residue_poly: QPoly,
    pub derivative_poly: QPoly,
    /// Decision of `p' >= 0` on `[0, 1]`.
    pub sturm: NonnegReport,
    /// Points where `f'` was evaluated, with the exact sign found.
    pub probes: Vec<(FieldElem, Sign)>,
    pub endpoint_difference: FieldElem,
    pub endpoint_sign: Sign,
    /// Last stored order used when `f` carries an uncertainty bound.
    pub truncated_at: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonotoneOutcome {
    Certificate(MonotoneCertificate),
    /// `f'(witness) <= 0`, so the positivity hypothesis fails.
    HypothesisNotVerified {
        witness: FieldElem,
        derivative: FieldElem,
    },
}

/// Probe points in `[a, b]`: the endpoints, three rational interior points
/// and `a + (b-a)X_k^{-1}` across scales.
pub fn monotone_probes(a: &FieldElem, b: &FieldElem) -> Vec<FieldElem> {
    let w = b - a;
    let mut out = vec![a.clone(), b.clone()];
    for q in [(1, 4), (1, 2), (3, 4)] {
        out.push(a + &w.scale(&Coeff::new(BigInt::from(q.0), BigInt::from(q.1))));
    }
    for k in 1..=SAMPLE_SCALES {
        out.push(a + &(&w * &inv_var(k)));
    }
    out
}

/// Residues of coefficients that all lie in the valuation ring.
pub fn residue_polynomial(coeffs: &[FieldElem]) -> Result<QPoly> {
    Ok(QPoly::new(coeffs.iter().map(residue).collect::<Result<_>>()?))
}

pub fn monotone_certificate(f: &PowerSeries, a: &FieldElem, b: &FieldElem) -> Result<MonotoneOutcome> {
    if a >= b {
        return Err(Error::domain(format!("empty interval: {a} is not below {b}")));
    }
    let df = f.derivative();
    let mut probes = Vec::new();
    for z in monotone_probes(a, b) {
        let (value, bound) = df.eval(&z)?;
        let sign = decided_sign(&value, &bound)?;
        if sign != Sign::Positive {
            return Ok(MonotoneOutcome::HypothesisNotVerified {
                witness: z,
                derivative: value,
            });
        }
        probes.push((z, sign));
    }

    let r = f.recenter(a)?;
    let w = b - a;
    let mut rescaled = vec![FieldElem::zero()];
    let mut wp = FieldElem::one();
    for c in r.coeffs().iter().skip(1) {
        wp = &wp * &w;
        rescaled.push(c * &wp);
    }
    let top = rescaled.iter().map(val).max().unwrap_or_else(GammaVal::zero);
    if top.is_zero() {
        return Err(Error::Depth("the stored part of f is constant on the interval".into()));
    }
    let normalization = monomial_with_valuation(&top.inv()?).expect("nonzero valuation");
    let (truncated_at, remainder) = if r.is_polynomial() {
        (None, GammaVal::zero())
    } else {
        let u = r.error_profile().geometric(&val(&w)).sup_from(1)?;
        let scaled = &u * &top.inv()?;
        if scaled >= GammaVal::one() {
            return Err(Error::Depth(format!(
                "after normalization the uncertainty reaches {scaled}, which is not below 1"
            )));
        }
        (Some(r.len() - 1), u)
    };
    let normalized: Vec<FieldElem> = rescaled.iter().map(|c| c * &normalization).collect();
    let residue_poly = residue_polynomial(&normalized)?;
    let derivative_poly = residue_poly.derivative();
    let zero = Coeff::zero();
    let one = Coeff::one();
    let sturm = nonnegative_on(&derivative_poly, &zero, &one);
    if let Some(x) = &sturm.witness {
        let z = a + &w.scale(x);
        let (value, _) = df.eval(&z)?;
        return Ok(MonotoneOutcome::HypothesisNotVerified {
            witness: z,
            derivative: value,
        });
    }
    let endpoint_difference = rescaled
        .iter()
        .skip(1)
        .fold(FieldElem::zero(), |acc, c| &acc + c);
    let endpoint_sign = decided_sign(&endpoint_difference, &remainder)?;
    Ok(MonotoneOutcome::Certificate(MonotoneCertificate {
        a: a.clone(),
        b: b.clone(),
        rescaled,
        normalization,
        residue_poly,
        derivative_poly,
        sturm,
        probes,
        endpoint_difference,
        endpoint_sign,
        truncated_at,
    }))
}
