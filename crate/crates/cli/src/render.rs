//! Text and JSON renderings of values and reports.

use kval_core::calculus::MONOTONE_NOTE;
use kval_core::text::{print_field, print_rational, print_series_expr, print_series_file};
use kval_core::{
    DistBracket, ExtremumReport, FieldElem, GammaVal, InversionCertificate, MonotoneOutcome,
    PowerSeries, Sign, Verdict,
};
use serde_json::{json, Value};

pub fn sign_word(s: Sign) -> &'static str {
    match s {
        Sign::Negative => "negative",
        Sign::Zero => "zero",
        Sign::Positive => "positive",
    }
}

pub fn gamma_json(g: &GammaVal) -> Value {
    json!({ "value": g.to_string(), "exponents": g.to_list() })
}

/// Expression form for exact series; the file form when a tail bound is attached.
pub fn series_text(s: &PowerSeries, var: &str) -> String {
    if s.is_polynomial() {
        return print_series_expr(s, var);
    }
    match print_series_file(s) {
        Ok(text) => text.trim_end().to_string(),
        Err(_) => print_series_expr(s, var),
    }
}

pub fn series_json(s: &PowerSeries, var: &str) -> Value {
    json!({
        "variable": var,
        "center": print_field(s.center()),
        "coeffs": s.coeffs().iter().map(print_field).collect::<Vec<_>>(),
        "exact": s.is_polynomial(),
        "expression": print_series_expr(s, var),
        "file": print_series_file(s).ok(),
    })
}

fn bracket_json(b: &DistBracket) -> Value {
    json!({
        "norm": b.norm.to_string(),
        "lower": b.lower.to_string(),
        "upper": b.upper.to_string(),
    })
}

pub fn verdict(v: &Verdict, depth: u32) -> (String, Value) {
    let data = match v {
        Verdict::Converges { schedule } => json!({
            "converges": true,
            "depth": depth,
            "schedule": schedule,
        }),
        Verdict::DivergesAt { m, from } => json!({
            "converges": false,
            "depth": depth,
            "m": m,
            "from": from,
        }),
    };
    (v.to_string(), data)
}

pub fn extremum(x0: &FieldElem, r: &ExtremumReport) -> (String, Value) {
    let mut lines = vec![
        format!("verdict: {}", r.verdict),
        format!("x0 = {}", print_field(x0)),
        format!("order m = {}, f^(m)(x0)/m! = {}", r.m, print_field(&r.leading)),
        format!("g = {}, g1 = {}, g2 = {}", r.g, r.g1, r.g2),
        format!("delta = {}", print_field(&r.delta)),
        "probes:".to_string(),
    ];
    for s in &r.samples {
        lines.push(format!(
            "  h = {}: f(x0+h) - f(x0) is {} (leading term: {})",
            print_field(&s.h),
            sign_word(s.sign),
            sign_word(s.predicted)
        ));
    }
    let data = json!({
        "verdict": r.verdict.to_string(),
        "x0": print_field(x0),
        "m": r.m,
        "leading": print_field(&r.leading),
        "g": r.g.to_string(),
        "g1": r.g1.to_string(),
        "g2": r.g2.to_string(),
        "delta": print_field(&r.delta),
        "samples": r.samples.iter().map(|s| json!({
            "h": print_field(&s.h),
            "sign": sign_word(s.sign),
            "predicted": sign_word(s.predicted),
        })).collect::<Vec<_>>(),
    });
    (lines.join("\n"), data)
}

pub fn monotone(a: &FieldElem, b: &FieldElem, out: &MonotoneOutcome) -> (String, Value) {
    match out {
        MonotoneOutcome::HypothesisNotVerified {
            witness,
            derivative,
        } => {
            let text = format!(
                "hypothesis not verified on [{}, {}]\nwitness z = {}: f'(z) = {} is not positive",
                print_field(a),
                print_field(b),
                print_field(witness),
                print_field(derivative)
            );
            let data = json!({
                "outcome": "hypothesis_not_verified",
                "a": print_field(a),
                "b": print_field(b),
                "witness": print_field(witness),
                "derivative": print_field(derivative),
            });
            (text, data)
        }
        MonotoneOutcome::Certificate(c) => {
            let mut lines = vec![
                format!("certified increasing on [{}, {}]", print_field(a), print_field(b)),
                format!(
                    "f(b) - f(a) = {} ({})",
                    print_field(&c.endpoint_difference),
                    sign_word(c.endpoint_sign)
                ),
                format!("normalization c = {}", print_field(&c.normalization)),
                format!("residue polynomial p(x) = {}", c.residue_poly),
                format!("p'(x) = {}, nonnegative on [0, 1]: {}", c.derivative_poly, c.sturm.nonnegative),
            ];
            if let Some(n) = c.truncated_at {
                lines.push(format!("stored terms used through order {n}"));
            }
            lines.push("probes of f':".into());
            for (z, s) in &c.probes {
                lines.push(format!("  z = {}: {}", print_field(z), sign_word(*s)));
            }
            lines.push(format!("note: {MONOTONE_NOTE}"));
            let data = json!({
                "outcome": "certificate",
                "a": print_field(a),
                "b": print_field(b),
                "endpoint_difference": print_field(&c.endpoint_difference),
                "endpoint_sign": sign_word(c.endpoint_sign),
                "normalization": print_field(&c.normalization),
                "rescaled": c.rescaled.iter().map(print_field).collect::<Vec<_>>(),
                "residue_poly": c.residue_poly.to_string(),
                "derivative_poly": c.derivative_poly.to_string(),
                "sturm": {
                    "nonnegative": c.sturm.nonnegative,
                    "samples": c.sturm.samples.iter().map(print_rational).collect::<Vec<_>>(),
                },
                "probes": c.probes.iter().map(|(z, s)| json!({
                    "z": print_field(z),
                    "sign": sign_word(*s),
                })).collect::<Vec<_>>(),
                "truncated_at": c.truncated_at,
                "note": MONOTONE_NOTE,
            });
            (lines.join("\n"), data)
        }
    }
}

fn holds(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

pub fn inversion(g: &PowerSeries, c: &InversionCertificate) -> (String, Value) {
    let d = &c.domain;
    let mut lines = vec![
        print_series_expr(g, "y"),
        "certificate:".to_string(),
        format!(
            "  x0 = {}, y0 = {}, s = f'(x0) = {}",
            print_field(&d.x0),
            print_field(&d.y0),
            print_field(&d.s)
        ),
        format!("  r1 = {}, delta = {}, spread = {}", d.r1, d.delta, d.spread),
        format!(
            "  stabilized at step {} (cap {})",
            c.stabilized_at,
            c.order + 2
        ),
    ];
    for (k, s) in c.steps.iter().enumerate() {
        lines.push(format!(
            "  step {}: norm of psi_{} - psi_{} = {}, d1 in [{}, {}], image norm {}",
            k + 1,
            k + 1,
            k,
            s.diff_norm,
            s.bracket.lower,
            s.bracket.upper,
            s.image_norm
        ));
    }
    let residual_zero = c.residual_is_zero();
    lines.push(format!(
        "  residual f(g(y)) - y through order {}: {}",
        c.order,
        if residual_zero { "zero" } else { "nonzero" }
    ));
    lines.push(format!("  contraction by g1^-1 per step: {}", holds(c.gamma_contraction_holds())));
    lines.push(format!("  d1 upper bound halves per step: {}", holds(c.d1_halving_holds())));
    lines.push(format!("  iterates stay in the r1 ball: {}", holds(c.well_defined())));
    if let Some(n) = c.truncated_at {
        lines.push(format!("  stored terms used through order {n}"));
    }
    let data = json!({
        "domain": {
            "x0": print_field(&d.x0),
            "y0": print_field(&d.y0),
            "s": print_field(&d.s),
            "r1": d.r1.to_string(),
            "delta": d.delta.to_string(),
            "spread": d.spread.to_string(),
        },
        "order": c.order,
        "stabilized_at": c.stabilized_at,
        "steps": c.steps.iter().map(|s| json!({
            "diff_norm": s.diff_norm.to_string(),
            "bracket": bracket_json(&s.bracket),
            "image_norm": s.image_norm.to_string(),
        })).collect::<Vec<_>>(),
        "residual": c.residual.iter().map(print_field).collect::<Vec<_>>(),
        "residual_zero": residual_zero,
        "gamma_contraction": c.gamma_contraction_holds(),
        "d1_halving": c.d1_halving_holds(),
        "well_defined": c.well_defined(),
        "truncated_at": c.truncated_at,
    });
    (lines.join("\n"), data)
}
