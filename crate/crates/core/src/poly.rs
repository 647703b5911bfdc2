//! Sparse multivariate polynomials over the rationals in the variables
//! `X_1, X_2, …`.
//!
//! Monomials are ordered antilexicographically (the exponent of the highest
//! variable decides first). That order coincides with the order of the
//! monomials' valuations, so the leading term of a polynomial is both its
//! valuation-dominant term and its sign-deciding term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gamma::GammaVal;
use crate::sturm::QPoly;

pub type Coeff = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_rational(c: &Coeff) -> Sign {
        if c.is_zero() {
            Sign::Zero
        } else if c.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn to_ordering(self) -> Ordering {
        match self {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

/// Exponent vector; entry `i` is the exponent of `X_{i+1}`. No trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// `X_n^k`.
    pub fn var_pow(n: u32, k: u32) -> Self {
        assert!(n >= 1);
        if k == 0 {
            return Monomial::one();
        }
        let mut v = vec![0; n as usize];
        v[n as usize - 1] = k;
        Monomial(v)
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, var: u32) -> u32 {
        self.0.get(var as usize - 1).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest variable index present, `0` for the unit monomial.
    pub fn max_var(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|e| *e as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() {
            (&self.0, &other.0)
        } else {
            (&other.0, &self.0)
        };
        let mut out = long.clone();
        for (i, e) in short.iter().enumerate() {
            out[i] += e;
        }
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut out = self.0.clone();
        for (i, e) in other.0.iter().enumerate() {
            if out[i] < *e {
                return None;
            }
            out[i] -= e;
        }
        Some(Monomial::from_exponents(out))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().min(other.0.len());
        Monomial::from_exponents((0..n).map(|i| self.0[i].min(other.0[i])).collect())
    }

    /// Same monomial with the exponent of `var` replaced by `k`.
    fn with_exponent(&self, var: u32, k: u32) -> Monomial {
        let mut v = self.0.clone();
        let idx = var as usize - 1;
        if v.len() <= idx {
            v.resize(idx + 1, 0);
        }
        v[idx] = k;
        Monomial::from_exponents(v)
    }

    /// The valuation of this monomial, `ĝ^α`.
    pub fn to_gamma(&self) -> GammaVal {
        GammaVal::from_exponents(
            self.0
                .iter()
                .enumerate()
                .map(|(i, e)| (i as u32 + 1, *e as i64)),
        )
        .expect("monomial indices are >= 1")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.0.len().max(other.0.len());
        for i in (0..n).rev() {
            let a = self.0.get(i).copied().unwrap_or(0);
            let b = other.0.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(Coeff::from_integer(BigInt::from(n)))
    }

    /// `X_n`.
    pub fn var(n: u32) -> Self {
        Poly::monomial(Monomial::var_pow(n, 1), Coeff::one())
    }

    pub fn monomial(m: Monomial, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(iter: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// The rational value when the polynomial is constant (including zero).
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Leading term in the antilexicographic monomial order.
    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Coeff {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Coeff::zero)
    }

    pub fn max_var(&self) -> u32 {
        self.terms.keys().map(Monomial::max_var).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: u32) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    /// Coefficient of `X_var^k`, as a polynomial free of `X_var`.
    pub fn coeff_of_degree(&self, var: u32, k: u32) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exponent(var) == k)
                .map(|(m, c)| (m.with_exponent(var, 0), c.clone())),
        )
    }

    /// Nonzero coefficients with respect to `X_var`.
    fn coeffs_in(&self, var: u32) -> Vec<Poly> {
        let mut by_deg: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            by_deg
                .entry(m.exponent(var))
                .or_default()
                .add_term(m.with_exponent(var, 0), c.clone());
        }
        by_deg.into_values().collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    /// `self -= c * m * other`, in place.
    fn sub_scaled(&mut self, other: &Poly, m: &Monomial, c: &Coeff) {
        for (k, a) in &other.terms {
            self.add_term(k.mul(m), -(a * c));
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Scales so the leading coefficient is `1`. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        self.div_within(divisor, usize::MAX)
    }

    /// As `exact_div`, but gives up with `None` after `max_steps` quotient terms.
    fn div_within(&self, divisor: &Poly, max_steps: usize) -> Option<Poly> {
        let (lm_d, lc_d) = divisor.leading()?;
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let lm_d = lm_d.clone();
        let lc_inv = lc_d.recip();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((lm_r, lc_r)) = rem.leading() {
            if quot.terms.len() >= max_steps {
                return None;
            }
            let m = lm_r.div(&lm_d)?;
            let c = lc_r * &lc_inv;
            rem.sub_scaled(divisor, &m, &c);
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Views `self` in `F_{n-1}[X_n]` and returns its leading coefficient and
    /// degree in `X_n`.
    pub fn leading_data(&self, n: u32) -> Result<(Poly, u32)> {
        if self.is_zero() {
            return Err(Error::domain("leading data of the zero polynomial"));
        }
        if n == 0 || self.max_var() > n {
            return Err(Error::domain(format!(
                "polynomial involves variables beyond X{n}"
            )));
        }
        let s = self.degree_in(n);
        Ok((self.coeff_of_degree(n, s), s))
    }

    /// Sign in the ordered field, by descending through leading coefficients
    /// in the highest variable until a rational remains.
    pub fn sign(&self) -> Sign {
        let mut p = self.clone();
        loop {
            if let Some(c) = p.as_constant() {
                return Sign::of_rational(&c);
            }
            let n = p.max_var();
            p = p.leading_data(n).expect("nonconstant polynomial").0;
        }
    }

    /// Valuation: the maximum over the monomials' values.
    pub fn valuation(&self) -> GammaVal {
        self.terms
            .keys()
            .map(Monomial::to_gamma)
            .max()
            .unwrap_or_else(GammaVal::zero)
    }

    /// Gcd of all monomials appearing in `self`.
    fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = it.next().cloned().unwrap_or_default();
        it.fold(first, |acc, m| acc.gcd(m))
    }

    /// Substitutes `X_var = value`.
    pub fn substitute(&self, var: u32, value: &Coeff) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let k = m.exponent(var) as usize;
            out.add_term(m.with_exponent(var, 0), c * num_traits::pow(value.clone(), k));
        }
        out
    }

    /// Evaluates at rational values for `X_1, …`. Missing variables evaluate to zero.
    pub fn eval_rational(&self, point: &[Coeff]) -> Coeff {
        let mut acc = Coeff::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.exponents().iter().enumerate() {
                let x = point.get(i).cloned().unwrap_or_else(Coeff::zero);
                t *= num_traits::pow(x, *e as usize);
            }
            acc += t;
        }
        acc
    }
}

/// Monic greatest common divisor.
///
/// Monomial factors are split off first. Specializing all variables but one
/// bounds the degree of the gcd in that variable; when every bound is zero
/// the inputs are coprime. Otherwise one variable is eliminated by
/// evaluation at integer points and the gcd is rebuilt by interpolation.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let (small, large) = if a.num_terms() <= b.num_terms() { (a, b) } else { (b, a) };
    if divides(small, large) {
        return small.monic();
    }
    let (ma, mb) = (a.monomial_content(), b.monomial_content());
    if !ma.is_one() || !mb.is_one() {
        let m = Poly::monomial(ma.gcd(&mb), Coeff::one());
        let a1 = a.exact_div(&Poly::monomial(ma, Coeff::one())).expect("monomial divides");
        let b1 = b.exact_div(&Poly::monomial(mb, Coeff::one())).expect("monomial divides");
        return (&m * &gcd(&a1, &b1)).monic();
    }
    if degree_bounds(a, b).iter().all(|d| *d == Some(0)) {
        return Poly::one();
    }
    interpolating_gcd(a, b)
}

/// Cheap divisibility test: degrees first, then a division that stops once
/// the quotient outgrows the dividend.
fn divides(d: &Poly, p: &Poly) -> bool {
    let vars = d.max_var();
    if vars > p.max_var() || (1..=vars).any(|v| d.degree_in(v) > p.degree_in(v)) {
        return false;
    }
    // a quotient survives every specialization of the other variables
    let v = vars.max(1);
    let point = modp::point(p.max_var(), 0);
    if let (Some(ds), Some(ps)) = (modp::specialize(d, v, &point), modp::specialize(p, v, &point)) {
        if !ds.is_empty() && !modp::rem(ps, &ds).is_empty() {
            return false;
        }
    }
    p.div_within(d, p.num_terms() + 1).is_some()
}

fn interpolating_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let vars: Vec<u32> = (1..=a.max_var().max(b.max_var()))
        .filter(|v| a.degree_in(*v) > 0 || b.degree_in(*v) > 0)
        .collect();
    // a variable missing from one side cannot occur in the gcd
    for &v in &vars {
        let (p, other) = match (a.degree_in(v), b.degree_in(v)) {
            (0, _) => (b, a),
            (_, 0) => (a, b),
            _ => continue,
        };
        let mut g = other.monic();
        for c in p.coeffs_in(v) {
            g = interpolating_gcd(&g, &c);
            if g.is_constant() {
                return Poly::one();
            }
        }
        return g;
    }
    if vars.len() == 1 {
        let y = vars[0];
        return from_univariate(&to_univariate(a, y).gcd(&to_univariate(b, y)), y);
    }
    let y = *vars.last().expect("at least two variables");
    let (sa, sb) = (split_off(a, y), split_off(b, y));
    let (ca, cb) = (univariate_content(&sa), univariate_content(&sb));
    let content = from_univariate(&ca.gcd(&cb), y);
    let pa = join(&sa, &ca, y);
    let pb = join(&sb, &cb, y);
    let lca = sa.values().next_back().expect("nonzero").div_rem(&ca).0;
    let lcb = sb.values().next_back().expect("nonzero").div_rem(&cb).0;
    let gamma = lca.gcd(&lcb);
    let bound = gamma.degree().unwrap_or(0) + pa.degree_in(y).min(pb.degree_in(y)) as usize;

    let mut h = Poly::zero();
    let mut lm: Option<Monomial> = None;
    let mut nodes = QPoly::new(vec![Coeff::one()]);
    let mut used = 0usize;
    let mut t = 0i64;
    loop {
        t += 1;
        let point = Coeff::from_integer(BigInt::from(t));
        if lca.eval(&point).is_zero() || lcb.eval(&point).is_zero() {
            continue;
        }
        let image = interpolating_gcd(&pa.substitute(y, &point), &pb.substitute(y, &point));
        if image.is_constant() {
            return content;
        }
        let image_lm = image.leading().expect("nonzero").0.clone();
        match lm.as_ref().map(|m| image_lm.cmp(m)) {
            Some(Ordering::Greater) => continue,
            Some(Ordering::Equal) => {}
            _ => {
                h = Poly::zero();
                nodes = QPoly::new(vec![Coeff::one()]);
                used = 0;
                lm = Some(image_lm);
            }
        }
        let image = image.scale(&gamma.eval(&point));
        let diff = &image - &h.substitute(y, &point);
        let unchanged = diff.is_zero();
        if !unchanged {
            let w = nodes.eval(&point).recip();
            h = &h + &(&diff * &from_univariate(&nodes, y)).scale(&w);
        }
        nodes = nodes.mul(&QPoly::new(vec![-point.clone(), Coeff::one()]));
        used += 1;
        if (unchanged || used > bound) && used > 1 {
            let candidate = join(&split_off(&h, y), &univariate_content(&split_off(&h, y)), y);
            if pa.exact_div(&candidate).is_some() && pb.exact_div(&candidate).is_some() {
                return (&content * &candidate).monic();
            }
        }
    }
}

/// Coefficients of `p` in the variables other than `y`, each univariate in `y`.
fn split_off(p: &Poly, y: u32) -> BTreeMap<Monomial, QPoly> {
    let mut raw: BTreeMap<Monomial, Vec<Coeff>> = BTreeMap::new();
    for (m, c) in &p.terms {
        let k = m.exponent(y) as usize;
        let v = raw.entry(m.with_exponent(y, 0)).or_default();
        if v.len() <= k {
            v.resize(k + 1, Coeff::zero());
        }
        v[k] = c.clone();
    }
    raw.into_iter().map(|(m, v)| (m, QPoly::new(v))).collect()
}

fn univariate_content(parts: &BTreeMap<Monomial, QPoly>) -> QPoly {
    parts
        .values()
        .fold(QPoly::zero(), |g, c| if g.is_zero() { c.monic() } else { g.gcd(c) })
}

/// Reassembles split coefficients, each divided by `content`.
fn join(parts: &BTreeMap<Monomial, QPoly>, content: &QPoly, y: u32) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in parts {
        let q = c.div_rem(content).0;
        for (k, a) in q.coeffs().iter().enumerate() {
            out.add_term(m.with_exponent(y, k as u32), a.clone());
        }
    }
    out
}

fn to_univariate(p: &Poly, y: u32) -> QPoly {
    let mut v = vec![Coeff::zero(); p.degree_in(y) as usize + 1];
    for (m, c) in &p.terms {
        v[m.exponent(y) as usize] = c.clone();
    }
    QPoly::new(v)
}

fn from_univariate(q: &QPoly, y: u32) -> Poly {
    Poly::from_terms(
        q.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| (Monomial::var_pow(y, k as u32), c.clone())),
    )
}

/// For each variable, an upper bound on the degree of `gcd(a, b)` in it, or
/// `None` when no usable specialization was found. The degree in `X_v` is at
/// most that of the univariate gcd after substituting values for the other
/// variables, computed modulo a prime, as long as both leading coefficients
/// in `X_v` survive the substitution and the reduction.
fn degree_bounds(a: &Poly, b: &Poly) -> Vec<Option<usize>> {
    let vars = a.max_var().max(b.max_var());
    (1..=vars)
        .map(|v| {
            if a.degree_in(v) == 0 || b.degree_in(v) == 0 {
                return Some(0);
            }
            (0..3u64).find_map(|attempt| {
                let point = modp::point(vars, attempt);
                let pa = modp::specialize(a, v, &point)?;
                let pb = modp::specialize(b, v, &point)?;
                if pa.len() != a.degree_in(v) as usize + 1 || pb.len() != b.degree_in(v) as usize + 1 {
                    return None;
                }
                Some(modp::gcd_degree(pa, pb))
            })
        })
        .collect()
}

/// Dense univariate arithmetic modulo the Mersenne prime `2^61 - 1`.
mod modp {
    use super::{Coeff, Poly};
    use num_bigint::BigInt;
    use num_traits::{ToPrimitive, Zero};

    pub const P: u64 = (1 << 61) - 1;

    pub fn mul(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }

    fn add(a: u64, b: u64) -> u64 {
        (a + b) % P
    }

    fn sub(a: u64, b: u64) -> u64 {
        (a + P - b) % P
    }

    fn pow(mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(a: u64) -> u64 {
        pow(a, P - 2)
    }

    fn reduce(n: &BigInt) -> u64 {
        let r = n % BigInt::from(P);
        let r = if r < BigInt::zero() { r + BigInt::from(P) } else { r };
        r.to_u64().expect("residue fits")
    }

    /// `None` when the denominator vanishes modulo `P`.
    pub fn coeff(c: &Coeff) -> Option<u64> {
        let d = reduce(c.denom());
        (d != 0).then(|| mul(reduce(c.numer()), inv(d)))
    }

    /// Deterministic substitution values, distinct per variable and attempt.
    pub fn point(vars: u32, attempt: u64) -> Vec<u64> {
        (1..=vars as u64)
            .map(|i| {
                let x = i.wrapping_mul(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(attempt + 1)) ^ (attempt << 32);
                x % (P - 2) + 2
            })
            .collect()
    }

    /// `p` in `X_v` with the other variables set to `point`, trailing zeros
    /// removed. `None` if a coefficient denominator vanishes modulo `P`.
    pub fn specialize(p: &Poly, v: u32, point: &[u64]) -> Option<Vec<u64>> {
        let mut out = vec![0u64; p.degree_in(v) as usize + 1];
        for (m, c) in p.terms() {
            let mut t = coeff(c)?;
            for (i, e) in m.exponents().iter().enumerate() {
                if i as u32 + 1 != v && *e > 0 {
                    t = mul(t, pow(point[i], *e as u64));
                }
            }
            let k = m.exponent(v) as usize;
            out[k] = add(out[k], t);
        }
        trim(&mut out);
        Some(out)
    }

    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    /// Remainder of `a` by nonzero `b`.
    pub fn rem(mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
        let db = b.len() - 1;
        let lb = inv(b[db]);
        while a.len() > db {
            let da = a.len() - 1;
            let q = mul(a[da], lb);
            for (i, bc) in b.iter().enumerate() {
                a[da - db + i] = sub(a[da - db + i], mul(q, *bc));
            }
            trim(&mut a);
        }
        a
    }

    pub fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
        while !b.is_empty() {
            let r = rem(a, &b);
            a = b;
            b = r;
        }
        a.len().saturating_sub(1)
    }
}


impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let (mut out, other) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Coeff {
        Coeff::from_integer(BigInt::from(n))
    }

    fn x(n: u32) -> Poly {
        Poly::var(n)
    }

    fn c(n: i64) -> Poly {
        Poly::from_int(n)
    }

    #[test]
    fn antilex_monomial_order() {
        let x1_cubed = Monomial::var_pow(1, 3);
        let x2 = Monomial::var_pow(2, 1);
        assert!(x1_cubed < x2);
        assert!(Monomial::one() < Monomial::var_pow(1, 1));
    }

    #[test]
    fn leading_data_examples() {
        // 3 X2^2 + X1 X2
        let p = &(&c(3) * &x(2).pow(2)) + &(&x(1) * &x(2));
        assert_eq!(p.leading_data(2).unwrap(), (c(3), 2));
        let p = &x(1) + &c(7);
        assert_eq!(p.leading_data(2).unwrap(), (p.clone(), 0));
        // X1 X3 - X3^2
        let p = &(&x(1) * &x(3)) - &x(3).pow(2);
        assert_eq!(p.leading_data(3).unwrap(), (c(-1), 2));
        assert!(Poly::zero().leading_data(1).is_err());
    }

    #[test]
    fn sign_follows_leading_coefficient_chain() {
        let p = &x(1) - &c(1_000_000);
        assert_eq!(p.sign(), Sign::Positive);
        let p = &(&c(-1) * &x(2)) + &x(1).pow(50);
        assert_eq!(p.sign(), Sign::Negative);
        // the leading term in the antilex order decides, as a cross-check
        let (_, lc) = p.leading().unwrap();
        assert_eq!(Sign::of_rational(lc), Sign::Negative);
    }

    #[test]
    fn exact_division() {
        let a = &x(1) + &x(2);
        let b = &x(1) - &(&c(2) * &x(3));
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert!(prod.exact_div(&(&x(1) + &c(1))).is_none());
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let g = &(&x(1) * &x(2)) + &c(3);
        let a = &g * &(&x(2).pow(2) - &x(1));
        let b = &g * &(&x(3) + &x(1).pow(2));
        assert_eq!(gcd(&a, &b), g.monic());
        assert_eq!(gcd(&(&x(1) + &c(1)), &(&x(1) - &c(1))), Poly::one());
        let m = &x(1).pow(2) * &x(2);
        assert_eq!(gcd(&m, &(&x(1).pow(3) + &x(1))), x(1));
    }

    #[test]
    fn gcd_with_rational_content() {
        let g = &x(2) - &x(1);
        let a = (&g * &g).scale(&(q(2) / q(3)));
        let b = (&g * &(&x(2) + &c(1))).scale(&q(5));
        assert_eq!(gcd(&a, &b), g.monic());
    }
}
