//! Dense univariate polynomials over ℚ and exact sign decisions on an
//! interval by Sturm sequences.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::poly::Coeff;

/// Coefficients in increasing degree, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly(Vec<Coeff>);

fn int(n: i64) -> Coeff {
    Coeff::from_integer(BigInt::from(n))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Coeff>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|c| int(*c)).collect())
    }

    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> Coeff {
        self.0.last().cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn eval(&self, x: &Coeff) -> Coeff {
        let mut acc = Coeff::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    fn scale(&self, c: &Coeff) -> QPoly {
        QPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.0.len().max(other.0.len());
        QPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(Coeff::zero);
                    let b = other.0.get(i).cloned().unwrap_or_else(Coeff::zero);
                    a - b
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Coeff::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.0.len() - 1;
        let lc = d.lead();
        let mut rem = self.0.clone();
        let mut quot = vec![Coeff::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let q = rem.last().unwrap() / &lc;
            for (i, c) in d.0.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic gcd, via a primitive remainder sequence over the integers.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (primitive_ints(self), primitive_ints(other));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = primitive_ints_of(int_prem(&a, &b));
            a = b;
            b = r;
        }
        QPoly::new(a.into_iter().map(Coeff::from_integer).collect()).monic()
    }

    /// The product of the distinct irreducible factors.
    pub fn squarefree(&self) -> QPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn sturm_sequence(&self) -> Vec<QPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            seq.push(r.scale(&int(-1)));
        }
        seq.pop();
        seq
    }
}

/// Integer coefficients with unit content and no trailing zeros.
fn primitive_ints(p: &QPoly) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for c in &p.0 {
        lcm = num_integer::Integer::lcm(&lcm, c.denom());
    }
    primitive_ints_of(p.0.iter().map(|c| c.numer() * (&lcm / c.denom())).collect())
}

fn primitive_ints_of(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |g, c| num_integer::Integer::gcd(&g, c));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|c| c / &g).collect()
}

/// `lc(b)^k · a mod b` over the integers.
fn int_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[dr - db + i] -= &lr * bc;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
                if i > 0 {
                    f.write_str("*")?;
                }
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Sturm sequence of a squarefree polynomial, for root counting.
pub struct Sturm {
    seq: Vec<QPoly>,
}

impl Sturm {
    pub fn new(squarefree: &QPoly) -> Self {
        Sturm {
            seq: squarefree.sturm_sequence(),
        }
    }

    fn variations(&self, x: &Coeff) -> usize {
        let mut count = 0;
        let mut prev: Option<bool> = None;
        for p in &self.seq {
            let v = p.eval(x);
            if v.is_zero() {
                continue;
            }
            let pos = v.is_positive();
            if prev.is_some_and(|q| q != pos) {
                count += 1;
            }
            prev = Some(pos);
        }
        count
    }

    /// Number of distinct roots in `(a, b]`.
    pub fn count(&self, a: &Coeff, b: &Coeff) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }

    /// Disjoint intervals `(a, b]` inside `(lo, hi]`, each holding exactly one root.
    pub fn isolate(&self, lo: &Coeff, hi: &Coeff) -> Vec<(Coeff, Coeff)> {
        let mut out = Vec::new();
        let mut stack = vec![(lo.clone(), hi.clone())];
        while let Some((a, b)) = stack.pop() {
            match self.count(&a, &b) {
                0 => {}
                1 => out.push((a, b)),
                _ => {
                    let mid = (&a + &b) / int(2);
                    stack.push((mid.clone(), b));
                    stack.push((a, mid));
                }
            }
        }
        out.sort();
        out
    }
}

/// Result of deciding `p >= 0` on a closed interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonnegReport {
    pub nonnegative: bool,
    /// Isolating intervals of the distinct roots in `(lo, hi]`.
    pub roots: Vec<(Coeff, Coeff)>,
    /// One point per sign-constant piece, plus both endpoints.
    pub samples: Vec<Coeff>,
    /// A point with `p < 0`, when one exists.
    pub witness: Option<Coeff>,
}

/// Decides `p(x) >= 0` for all `x` in `[lo, hi]` exactly.
///
/// Between consecutive distinct roots the sign of `p` is constant and
/// nonzero, so one sample per gap together with the endpoints decides.
pub fn nonnegative_on(p: &QPoly, lo: &Coeff, hi: &Coeff) -> NonnegReport {
    assert!(lo <= hi, "empty interval");
    if p.is_zero() {
        return NonnegReport {
            nonnegative: true,
            roots: Vec::new(),
            samples: vec![lo.clone(), hi.clone()],
            witness: None,
        };
    }
    let q = p.squarefree();
    let sturm = Sturm::new(&q);
    let roots = sturm.isolate(lo, hi);
    let mut samples = vec![lo.clone()];
    let mut left = lo.clone();
    for i in 0..=roots.len() {
        let right = roots.get(i).map_or_else(|| hi.clone(), |r| r.1.clone());
        if left < right {
            samples.push(point_in_gap(&sturm, &left, &right));
        }
        if let Some(r) = roots.get(i) {
            left = r.1.clone();
        }
    }
    samples.push(hi.clone());
    let witness = samples.iter().find(|x| p.eval(x).is_negative()).cloned();
    NonnegReport {
        nonnegative: witness.is_none(),
        roots,
        samples,
        witness,
    }
}

/// A point `s` in `(left, right]` with no root in `(left, s]`.
fn point_in_gap(sturm: &Sturm, left: &Coeff, right: &Coeff) -> Coeff {
    let mut s = right.clone();
    while sturm.count(left, &s) > 0 {
        s = (left + &s) / int(2);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Coeff {
        Coeff::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn counts_roots() {
        // (x - 1/3)(x - 2/3)(x - 2)
        let p = QPoly::from_ints(&[-4, 22, -27, 9]);
        let s = Sturm::new(&p.squarefree());
        assert_eq!(s.count(&q(0, 1), &q(1, 1)), 2);
        assert_eq!(s.count(&q(0, 1), &q(3, 1)), 3);
        assert_eq!(s.count(&q(1, 3), &q(1, 2)), 0);
        assert_eq!(s.count(&q(0, 1), &q(1, 3)), 1);
        assert_eq!(s.isolate(&q(0, 1), &q(1, 1)).len(), 2);
    }

    #[test]
    fn squarefree_removes_repeated_factors() {
        // (x - 1)^2 (x + 2)
        let p = QPoly::from_ints(&[2, -3, 0, 1]);
        assert_eq!(p.squarefree(), QPoly::from_ints(&[-2, 1, 1]));
    }

    #[test]
    fn nonnegativity_decisions() {
        // (2x - 1)^2 touches zero inside
        let p = QPoly::from_ints(&[1, -4, 4]);
        assert!(nonnegative_on(&p, &q(0, 1), &q(1, 1)).nonnegative);
        // x - 1/2 changes sign
        let p = QPoly::new(vec![q(-1, 2), q(1, 1)]);
        let r = nonnegative_on(&p, &q(0, 1), &q(1, 1));
        assert!(!r.nonnegative);
        assert!(p.eval(r.witness.as_ref().unwrap()).is_negative());
        // negative only on a tiny piece: (x - 1/3)(x - 1/3 - 1/1000)
        let a = q(1, 3);
        let b = q(1003, 3000);
        let p = QPoly::new(vec![&a * &b, -(&a + &b), q(1, 1)]);
        let r = nonnegative_on(&p, &q(0, 1), &q(1, 1));
        assert!(!r.nonnegative);
        let w = r.witness.unwrap();
        assert!(w > a && w < b);
        assert!(nonnegative_on(&QPoly::from_ints(&[1]), &q(0, 1), &q(1, 1)).nonnegative);
    }

    #[test]
    fn display() {
        assert_eq!(QPoly::from_ints(&[0, 1]).to_string(), "x");
        assert_eq!(QPoly::new(vec![q(1, 3), q(0, 1), q(-2, 1)]).to_string(), "-2*x^2 + 1/3");
    }
}
