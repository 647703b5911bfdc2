//! Power series `Σ a_n (z - u)^n` with exact stored coefficients and a
//! certified Γ-valued bound on everything that is not stored exactly.

pub mod tail;

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::gamma::GammaVal;
use crate::poly::Coeff;
use crate::valuation::{inv_generator, val, DyadicDist};

pub use tail::{Affine, Eventual, Profile, RuleFactor, RuleTerm, TailRule};

/// Default number of levels `ĝ_1^{-1}, …, ĝ_M^{-1}` a convergence verdict covers.
pub const DEFAULT_DEPTH: u32 = 6;

/// Supremum norm on a ball, always an attained maximum.
pub type NormValue = GammaVal;

/// Outcome of a convergence check over the levels `ĝ_1^{-1}, …, ĝ_M^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `schedule[m-1]` is the least `N` with `v(a_n) < ĝ_m^{-1}` for all `n >= N`.
    Converges { schedule: Vec<u64> },
    /// Coefficient valuations stay at or above `ĝ_m^{-1}` for every `n >= from`.
    DivergesAt { m: u32, from: Option<u64> },
}

impl Verdict {
    pub fn converges(&self) -> bool {
        matches!(self, Verdict::Converges { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Converges { schedule } => {
                let s: Vec<String> = schedule.iter().map(u64::to_string).collect();
                write!(f, "converges, schedule [{}]", s.join(", "))
            }
            Verdict::DivergesAt { m, from: Some(n) } => write!(
                f,
                "diverges at m = {m}: coefficient valuations stay >= {} for all n >= {n}",
                inv_generator(*m)
            ),
            Verdict::DivergesAt { m, from: None } => write!(
                f,
                "diverges at m = {m}: no point is known past which coefficient valuations stay below {}",
                inv_generator(*m)
            ),
        }
    }
}

/// Two-sided bracket for the uniform distance `d_1(f, g)` on a ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistBracket {
    pub norm: NormValue,
    pub lower: DyadicDist,
    pub upper: DyadicDist,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    center: FieldElem,
    coeffs: Vec<FieldElem>,
    error: Profile,
    schedule: Vec<u64>,
}

impl PowerSeries {
    /// Exact polynomial `Σ coeffs[n] (z - center)^n`. Trailing zeros are dropped.
    pub fn polynomial(center: FieldElem, mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(FieldElem::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(FieldElem::zero());
        }
        let error = Profile::zero(coeffs.len());
        PowerSeries {
            center,
            coeffs,
            error,
            schedule: Vec::new(),
        }
    }

    /// Stored coefficients followed by unknown ones bounded by `rule(n)` for
    /// `n >= coeffs.len()`. A nonempty `schedule` is checked against the data.
    pub fn with_bound(
        center: FieldElem,
        coeffs: Vec<FieldElem>,
        rule: TailRule,
        schedule: Vec<u64>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("a series needs at least one stored coefficient"));
        }
        let len = coeffs.len() as u64;
        if rule.valid_from() > len {
            return Err(Error::domain(format!(
                "tail rule is undefined at n = {len}; it starts at n = {}",
                rule.valid_from()
            )));
        }
        let error = Profile {
            head: vec![GammaVal::zero(); coeffs.len()],
            tail: rule,
        };
        let series = PowerSeries {
            center,
            coeffs,
            error,
            schedule: Vec::new(),
        };
        if !schedule.is_empty() {
            series.check_schedule(&schedule)?;
        }
        Ok(PowerSeries { schedule, ..series })
    }

    fn check_schedule(&self, schedule: &[u64]) -> Result<()> {
        let profile = self.coefficient_profile();
        for (i, declared) in schedule.iter().enumerate() {
            let m = i as u32 + 1;
            let target = inv_generator(m);
            match profile.first_below(&target)? {
                Some(least) if least <= *declared => {}
                Some(least) => {
                    return Err(Error::Convergence(format!(
                        "declared N({m}) = {declared}, but the bound reaches {target} at n = {}",
                        least - 1
                    )))
                }
                None => {
                    return Err(Error::Convergence(format!(
                        "declared N({m}) = {declared}, but the bound never stays below {target}"
                    )))
                }
            }
        }
        Ok(())
    }

    fn from_parts(center: FieldElem, coeffs: Vec<FieldElem>, error: Profile) -> Self {
        debug_assert_eq!(coeffs.len(), error.len());
        if error.is_zero() {
            return Self::polynomial(center, coeffs);
        }
        PowerSeries {
            center,
            coeffs,
            error,
            schedule: Vec::new(),
        }
    }

    pub fn constant(center: FieldElem, c: FieldElem) -> Self {
        Self::polynomial(center, vec![c])
    }

    /// `z`, expanded around `center`.
    pub fn identity(center: FieldElem) -> Self {
        let c0 = center.clone();
        Self::polynomial(center, vec![c0, FieldElem::one()])
    }

    pub fn center(&self) -> &FieldElem {
        &self.center
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Stored coefficient `a_n`; zero past the table.
    pub fn coeff(&self, n: usize) -> FieldElem {
        self.coeffs.get(n).cloned().unwrap_or_else(FieldElem::zero)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn error_profile(&self) -> &Profile {
        &self.error
    }

    /// Declared convergence schedule; empty when none was supplied.
    pub fn schedule(&self) -> &[u64] {
        &self.schedule
    }

    /// True when every coefficient is known exactly.
    pub fn is_polynomial(&self) -> bool {
        self.error.is_zero()
    }

    /// `n ↦ max(v(a_n), uncertainty(n))`.
    pub fn coefficient_profile(&self) -> Profile {
        Profile {
            head: self
                .coeffs
                .iter()
                .zip(&self.error.head)
                .map(|(a, e)| val(a).max(e.clone()))
                .collect(),
            tail: self.error.tail.clone(),
        }
    }

    pub fn convergence_check(&self, depth: u32) -> Result<Verdict> {
        let profile = self.coefficient_profile();
        let mut schedule = Vec::with_capacity(depth as usize);
        for m in 1..=depth {
            let target = inv_generator(m);
            match profile.first_below(&target)? {
                Some(n) => schedule.push(n),
                None => {
                    let from = match profile.tail.eventually_below(&target)? {
                        Eventual::NotBelow(w) => w.map(|f| f.max(profile.len() as u64)),
                        Eventual::Below(_) => None,
                    };
                    return Ok(Verdict::DivergesAt { m, from });
                }
            }
        }
        Ok(Verdict::Converges { schedule })
    }

    fn require_convergent(&self) -> Result<()> {
        if self.is_polynomial() {
            return Ok(());
        }
        match self.convergence_check(DEFAULT_DEPTH)? {
            Verdict::Converges { .. } => Ok(()),
            v => Err(Error::Convergence(v.to_string())),
        }
    }

    fn same_center(&self, other: &PowerSeries) -> Result<()> {
        if self.center != other.center {
            return Err(Error::Center(format!(
                "centers {} and {} differ; recenter first",
                self.center, other.center
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.same_center(other)?;
        let len = self.len().max(other.len());
        let coeffs = (0..len).map(|n| &self.coeff(n) + &other.coeff(n)).collect();
        let error = self.error.max_with(&other.error, len)?;
        Ok(Self::from_parts(self.center.clone(), coeffs, error))
    }

    pub fn neg(&self) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
            schedule: Vec::new(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &FieldElem) -> PowerSeries {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        Self::from_parts(self.center.clone(), coeffs, self.error.scale(&val(c)))
    }

    pub fn mul(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.same_center(other)?;
        let len = self.len() + other.len() - 1;
        let mut coeffs = vec![FieldElem::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        let error = if self.is_polynomial() && other.is_polynomial() {
            Profile::zero(len)
        } else {
            // (A + P)(B + Q) - AB = A·Q + P·(B + Q), bounded termwise.
            let exact_a = Profile {
                head: self.coeffs.iter().map(val).collect(),
                tail: TailRule::Zero,
            };
            let b_or_q = other.coefficient_profile();
            let rule = TailRule::max_of(vec![
                TailRule::conv(exact_a, other.error.clone(), 0, GammaVal::one()),
                TailRule::conv(self.error.clone(), b_or_q, 0, GammaVal::one()),
            ]);
            let mut head = Vec::with_capacity(len);
            for n in 0..len as u64 {
                head.push(rule.eval(n)?);
            }
            Profile { head, tail: rule }
        };
        Ok(Self::from_parts(self.center.clone(), coeffs, error))
    }

    pub fn derivative(&self) -> PowerSeries {
        let len = self.len().saturating_sub(1).max(1);
        let coeffs = (0..len)
            .map(|n| self.coeff(n + 1).scale(&Coeff::from_integer(BigInt::from(n + 1))))
            .collect();
        let head = (0..len as u64)
            .map(|n| self.error.at(n + 1).expect("derivative of a valid profile"))
            .collect();
        let error = Profile {
            head,
            tail: self.error.tail.shift(1),
        };
        Self::from_parts(self.center.clone(), coeffs, error)
    }

    /// `(value of the stored part at z, bound on the valuation of everything omitted)`.
    pub fn eval(&self, z: &FieldElem) -> Result<(FieldElem, GammaVal)> {
        self.require_convergent()?;
        let h = z - &self.center;
        let mut value = FieldElem::zero();
        for a in self.coeffs.iter().rev() {
            value = &(&value * &h) + a;
        }
        let w = val(&h);
        let bound = if self.is_polynomial() {
            GammaVal::zero()
        } else if w.is_zero() {
            self.error.head[0].clone()
        } else {
            self.error.geometric(&w).sup()?
        };
        Ok((value, bound))
    }

    /// Expansion around `v`: `b_n = Σ_{k>=n} C(k,n) a_k (v - u)^{k-n}`.
    pub fn recenter(&self, v: &FieldElem) -> Result<PowerSeries> {
        self.require_convergent()?;
        let w = v - &self.center;
        if w.is_zero() {
            return Ok(self.clone());
        }
        let len = self.len();
        let mut powers = Vec::with_capacity(len);
        let mut p = FieldElem::one();
        for _ in 0..len {
            powers.push(p.clone());
            p = &p * &w;
        }
        let mut coeffs = Vec::with_capacity(len);
        for n in 0..len {
            let mut acc = FieldElem::zero();
            let mut binom = BigInt::from(1);
            for k in n..len {
                if k > n {
                    binom = binom * BigInt::from(k) / BigInt::from(k - n);
                }
                let a = &self.coeffs[k];
                if !a.is_zero() {
                    let term = (a * &powers[k - n]).scale(&Coeff::from_integer(binom.clone()));
                    acc = &acc + &term;
                }
            }
            coeffs.push(acc);
        }
        if self.is_polynomial() {
            return Ok(Self::polynomial(v.clone(), coeffs));
        }
        let omega = val(&w);
        let tail = TailRule::Resum {
            inner: Box::new(self.error.tail.clone()),
            ratio: omega.clone(),
            from: len as u64,
        };
        let mut head = Vec::with_capacity(len);
        for n in 0..len {
            let mut e = tail.eval(n as u64)?;
            for k in n..len {
                e = e.max(&self.error.head[k] * &omega.powu((k - n) as u64));
            }
            head.push(e);
        }
        Ok(Self::from_parts(v.clone(), coeffs, Profile { head, tail }))
    }

    /// Keeps `a_0..a_N` exactly and moves the rest into the uncertainty bound.
    pub fn truncate(&self, order: usize) -> PowerSeries {
        if self.len() <= order + 1 {
            return self.clone();
        }
        let profile = self.coefficient_profile();
        let dropped = TailRule::Table {
            start: order as u64 + 1,
            values: profile.head[order + 1..].to_vec(),
        };
        let error = Profile {
            head: self.error.head[..=order].to_vec(),
            tail: TailRule::max_of(vec![dropped, self.error.tail.clone()]),
        };
        Self::from_parts(self.center.clone(), self.coeffs[..=order].to_vec(), error)
    }

    /// The stored coefficients through order `N` as an exact polynomial.
    pub fn jet(&self, order: usize) -> PowerSeries {
        let end = self.len().min(order + 1);
        Self::polynomial(self.center.clone(), self.coeffs[..end].to_vec())
    }

    /// `outer(inner(y))`, centered at the inner center, exact through `order`.
    pub fn compose(outer: &PowerSeries, inner: &PowerSeries, order: usize) -> Result<PowerSeries> {
        if !outer.is_polynomial() || !inner.is_polynomial() {
            return Err(Error::Composition(
                "composition needs exactly known coefficients; truncate first".into(),
            ));
        }
        if inner.coeffs[0] != outer.center {
            return Err(Error::Composition(format!(
                "inner constant term {} differs from outer center {}",
                inner.coeffs[0], outer.center
            )));
        }
        let jet = Self::compose_jet(outer, inner, Some(order));
        let top = (outer.len() - 1) * (inner.len() - 1);
        if top <= order {
            return Ok(jet);
        }
        // v(c_n) for n > order is at most max_k v(a_k)·max_{i_1+…+i_k=n} Π v(h_i)
        let h: Vec<GammaVal> = inner.coeffs.iter().map(val).collect();
        let mut power = vec![GammaVal::one()];
        let mut bound = vec![GammaVal::zero(); top + 1];
        for a in outer.coeffs.iter().skip(1) {
            let mut next = vec![GammaVal::zero(); power.len() + h.len() - 1];
            for (i, x) in power.iter().enumerate() {
                for (j, y) in h.iter().enumerate().skip(1) {
                    let t = x * y;
                    if t > next[i + j] {
                        next[i + j] = t;
                    }
                }
            }
            power = next;
            let va = val(a);
            for (n, p) in power.iter().enumerate() {
                let t = &va * p;
                if t > bound[n] {
                    bound[n] = t;
                }
            }
        }
        let values = bound.split_off(order + 1);
        if values.iter().all(GammaVal::is_zero) {
            return Ok(jet);
        }
        let mut coeffs = jet.coeffs;
        coeffs.resize(order + 1, FieldElem::zero());
        let error = Profile {
            head: vec![GammaVal::zero(); order + 1],
            tail: TailRule::Table {
                start: order as u64 + 1,
                values,
            },
        };
        Ok(Self::from_parts(inner.center.clone(), coeffs, error))
    }

    /// `Σ a_k h^k` with `h = inner - outer.center`, from successive powers of
    /// `h`, optionally truncated after every product.
    pub(crate) fn compose_jet(
        outer: &PowerSeries,
        inner: &PowerSeries,
        order: Option<usize>,
    ) -> PowerSeries {
        let mut h = inner.coeffs.clone();
        h[0] = &h[0] - &outer.center;
        let cut = |v: &mut Vec<FieldElem>| {
            if let Some(n) = order {
                v.truncate(n + 1);
            }
        };
        cut(&mut h);
        let mut acc = vec![outer.coeffs[0].clone()];
        let mut power = vec![FieldElem::one()];
        for a in outer.coeffs.iter().skip(1) {
            let mut next = vec![FieldElem::zero(); power.len() + h.len() - 1];
            for (i, x) in power.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in h.iter().enumerate() {
                    if !y.is_zero() && order.is_none_or(|n| i + j <= n) {
                        next[i + j] = &next[i + j] + &(x * y);
                    }
                }
            }
            cut(&mut next);
            power = next;
            if a.is_zero() {
                continue;
            }
            if acc.len() < power.len() {
                acc.resize(power.len(), FieldElem::zero());
            }
            for (k, p) in power.iter().enumerate() {
                if !p.is_zero() {
                    acc[k] = &acc[k] + &(a * p);
                }
            }
        }
        Self::polynomial(inner.center.clone(), acc)
    }

    /// `max_n v(a_n) r^n` over the closed ball of radius `r`, with all
    /// attaining indices. The uncertainty must stay strictly below it.
    pub fn sup_norm_ball(&self, r: &GammaVal) -> Result<(NormValue, Vec<usize>)> {
        if r.is_zero() {
            return Err(Error::domain("ball radius must be nonzero"));
        }
        self.require_convergent()?;
        let weighted: Vec<GammaVal> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| &val(a) * &r.powu(n as u64))
            .collect();
        let best = weighted.iter().cloned().max().unwrap_or_else(GammaVal::zero);
        let argmax = if best.is_zero() {
            Vec::new()
        } else {
            (0..weighted.len()).filter(|n| weighted[*n] == best).collect()
        };
        if !self.is_polynomial() {
            let unknown = self.error.geometric(r).sup()?;
            if unknown >= best {
                return Err(Error::Depth(format!(
                    "uncertainty {unknown} is not dominated by the stored maximum {best}"
                )));
            }
        }
        Ok((best, argmax))
    }

    /// Some `z = u + X_m^t` with `v(f(z) - a_0) > r`.
    pub fn unboundedness_witness(&self, r: &GammaVal) -> Result<FieldElem> {
        if self.coeffs.iter().skip(1).all(FieldElem::is_zero) {
            return Err(Error::domain("a constant series is bounded"));
        }
        self.require_convergent()?;
        let support = self
            .coeffs
            .iter()
            .map(FieldElem::max_var)
            .max()
            .unwrap_or(0)
            .max(r.max_support());
        for m in 1..=support + 2 {
            for t in 1..=8i64 {
                let w = GammaVal::generator_pow(m, t);
                if let Some(top) = self.unique_dominant(&w)? {
                    if top > *r {
                        let step = FieldElem::var(m).powu(t as u32);
                        return Ok(&self.center + &step);
                    }
                }
            }
        }
        Err(Error::Depth(format!(
            "no witness of the form u + X_m^t found for m <= {}",
            support + 2
        )))
    }

    /// The valuation of the unique dominating term `a_n w^n` with `n >= 1`,
    /// when it also dominates `a_0` and all uncertainty.
    fn unique_dominant(&self, w: &GammaVal) -> Result<Option<GammaVal>> {
        let weighted: Vec<GammaVal> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| &val(a) * &w.powu(n as u64))
            .collect();
        let top = weighted[1..].iter().cloned().max().unwrap_or_else(GammaVal::zero);
        if top.is_zero() || weighted[1..].iter().filter(|v| **v == top).count() != 1 {
            return Ok(None);
        }
        if weighted[0] >= top {
            return Ok(None);
        }
        if !self.is_polynomial() {
            match self.error.geometric(w).sup() {
                Ok(u) if u < top => {}
                _ => return Ok(None),
            }
        }
        Ok(Some(top))
    }

    /// Bracket for `d_1(f, g)` over the closed ball of radius `r`.
    pub fn func_dist_bracket(f: &PowerSeries, g: &PowerSeries, r: &GammaVal) -> Result<DistBracket> {
        f.same_center(g)?;
        let (norm, _) = f.sub(g)?.sup_norm_ball(r)?;
        Ok(dist_bracket_for_norm(norm))
    }
}

/// The possible values of `φ(|y|)` over elements `y` whose valuations reach
/// at most `norm`, with `norm` attained.
pub fn dist_bracket_for_norm(norm: NormValue) -> DistBracket {
    if norm.is_zero() {
        return DistBracket {
            norm,
            lower: DyadicDist::Zero,
            upper: DyadicDist::Zero,
        };
    }
    let mut k = 1;
    while inv_generator(k) > norm {
        k += 1;
    }
    let (lower, upper) = if norm == inv_generator(k) {
        (DyadicDist::Pow(k + 1), DyadicDist::Pow(k))
    } else {
        (DyadicDist::Pow(k), DyadicDist::Pow(k))
    };
    DistBracket { norm, lower, upper }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_series_expr(self, "z"))
    }
}

/// Compares two series coefficientwise through `order`.
pub fn agree_through(a: &PowerSeries, b: &PowerSeries, order: usize) -> bool {
    (0..=order).all(|n| a.coeff(n) == b.coeff(n))
}

/// Index of the first coefficient where `a` and `b` differ, if any within `order`.
pub fn first_difference(a: &PowerSeries, b: &PowerSeries, order: usize) -> Option<usize> {
    (0..=order).find(|n| a.coeff(*n) != b.coeff(*n))
}
