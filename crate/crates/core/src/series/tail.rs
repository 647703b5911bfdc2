//! Γ-valued bounds on the unknown part of a coefficient stream.
//!
//! A [`Profile`] bounds the uncertainty of every coefficient: explicit values
//! for the stored range and a symbolic [`TailRule`] beyond it. The symbolic
//! rules are closed under the operations the series arithmetic needs, and
//! each can decide when it drops below a given value for good.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gamma::GammaVal;

/// `slope * n + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub slope: i64,
    pub offset: i64,
}

impl Affine {
    pub const fn new(slope: i64, offset: i64) -> Self {
        Affine { slope, offset }
    }

    pub const fn constant(c: i64) -> Self {
        Affine { slope: 0, offset: c }
    }

    pub const fn n() -> Self {
        Affine { slope: 1, offset: 0 }
    }

    pub fn at(&self, n: u64) -> i64 {
        self.slope * n as i64 + self.offset
    }

    pub fn is_zero(&self) -> bool {
        self.slope == 0 && self.offset == 0
    }

    fn add(&self, other: &Affine) -> Affine {
        Affine::new(self.slope + other.slope, self.offset + other.offset)
    }

    fn shift(&self, k: u64) -> Affine {
        Affine::new(self.slope, self.offset + self.slope * k as i64)
    }

    /// Sign for all large `n`.
    fn eventual_sign(&self) -> i64 {
        if self.slope != 0 {
            self.slope.signum()
        } else {
            self.offset.signum()
        }
    }

    /// First `n0` from which the sign of `at(n)` equals [`Self::eventual_sign`].
    fn sign_stable_from(&self) -> u64 {
        match self.slope.cmp(&0) {
            Ordering::Equal => 0,
            Ordering::Greater if self.offset > 0 => 0,
            Ordering::Greater => ((-self.offset) / self.slope + 1) as u64,
            Ordering::Less if self.offset < 0 => 0,
            Ordering::Less => (self.offset / (-self.slope) + 1) as u64,
        }
    }
}

/// `ĝ_{index(n)}^{exponent(n)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleFactor {
    pub index: Affine,
    pub exponent: Affine,
}

/// Product of factors; the empty product is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RuleTerm {
    factors: Vec<RuleFactor>,
}

impl RuleTerm {
    pub fn new(factors: Vec<RuleFactor>) -> Result<Self> {
        for f in &factors {
            if f.index.slope < 0 || (f.index.slope == 0 && f.index.offset < 1) {
                return Err(Error::domain(
                    "rule index must be a nondecreasing expression with values >= 1",
                ));
            }
        }
        Ok(Self::canonical(factors))
    }

    fn canonical(mut factors: Vec<RuleFactor>) -> Self {
        factors.sort_by_key(|f| f.index);
        let mut out: Vec<RuleFactor> = Vec::with_capacity(factors.len());
        for f in factors {
            match out.last_mut() {
                Some(last) if last.index == f.index => {
                    last.exponent = last.exponent.add(&f.exponent);
                }
                _ => out.push(f),
            }
        }
        out.retain(|f| !f.exponent.is_zero());
        RuleTerm { factors: out }
    }

    pub fn one() -> Self {
        RuleTerm::default()
    }

    /// The constant rule with value `g`, which must be nonzero.
    pub fn constant(g: &GammaVal) -> Self {
        debug_assert!(!g.is_zero());
        Self::canonical(
            g.exponents()
                .map(|(i, e)| RuleFactor {
                    index: Affine::constant(i as i64),
                    exponent: Affine::constant(e),
                })
                .collect(),
        )
    }

    pub fn factors(&self) -> &[RuleFactor] {
        &self.factors
    }

    /// First `n` at which every index is at least `1`.
    pub fn valid_from(&self) -> u64 {
        self.factors
            .iter()
            .filter(|f| f.index.slope > 0 && f.index.offset < 1)
            .map(|f| {
                let need = 1 - f.index.offset;
                ((need + f.index.slope - 1) / f.index.slope) as u64
            })
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, n: u64) -> Result<GammaVal> {
        let mut pairs = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let idx = f.index.at(n);
            if idx < 1 {
                return Err(Error::Internal(format!(
                    "rule evaluated at n = {n} where an index is below 1"
                )));
            }
            pairs.push((idx as u32, f.exponent.at(n)));
        }
        GammaVal::from_exponents(pairs)
    }

    pub fn mul(&self, other: &RuleTerm) -> RuleTerm {
        let mut all = self.factors.clone();
        all.extend(other.factors.iter().cloned());
        Self::canonical(all)
    }

    /// `n ↦ self(n) · r^n`.
    pub fn geometric(&self, r: &GammaVal) -> RuleTerm {
        let mut all = self.factors.clone();
        all.extend(r.exponents().map(|(i, e)| RuleFactor {
            index: Affine::constant(i as i64),
            exponent: Affine::new(e, 0),
        }));
        Self::canonical(all)
    }

    /// `n ↦ self(n + k)`.
    pub fn shift(&self, k: u64) -> RuleTerm {
        Self::canonical(
            self.factors
                .iter()
                .map(|f| RuleFactor {
                    index: f.index.shift(k),
                    exponent: f.exponent.shift(k),
                })
                .collect(),
        )
    }

    /// Returns `(n0, ord)` such that `self(n)` compares to `target` as `ord`
    /// for every `n >= n0`, with `n0` minimal for that property.
    ///
    /// Decided symbolically: once the moving indices are strictly ordered and
    /// above every fixed one, the largest index present decides, and its
    /// exponent has a stable sign from some point on.
    pub fn eventual_cmp(&self, target: &GammaVal) -> Result<(u64, Ordering)> {
        let inv = target.inv()?;
        let d = self.mul(&RuleTerm::constant_or_one(&inv));
        let mut moving: Vec<&RuleFactor> =
            d.factors.iter().filter(|f| f.index.slope > 0).collect();
        let mut fixed: Vec<&RuleFactor> =
            d.factors.iter().filter(|f| f.index.slope == 0).collect();
        moving.sort_by_key(|f| std::cmp::Reverse(f.index));
        fixed.sort_by_key(|f| std::cmp::Reverse(f.index));

        let mut n0 = d.valid_from();
        for w in moving.windows(2) {
            let (hi, lo) = (w[0].index, w[1].index);
            if hi.slope > lo.slope {
                let diff = lo.offset - hi.offset;
                if diff >= 0 {
                    n0 = n0.max((diff / (hi.slope - lo.slope) + 1) as u64);
                }
            }
        }
        if let (Some(lowest), Some(top_fixed)) = (moving.last(), fixed.first()) {
            let diff = top_fixed.index.offset - lowest.index.offset;
            if diff >= 0 {
                n0 = n0.max((diff / lowest.index.slope + 1) as u64);
            }
        }
        let ord = match moving.first().or(fixed.first()) {
            None => Ordering::Equal,
            Some(f) => {
                n0 = n0.max(f.exponent.sign_stable_from());
                if f.exponent.eventual_sign() > 0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        };
        let floor = self.valid_from();
        n0 = n0.max(floor);
        while n0 > floor && self.eval(n0 - 1)?.cmp(target) == ord {
            n0 -= 1;
        }
        Ok((n0, ord))
    }

    fn constant_or_one(g: &GammaVal) -> RuleTerm {
        if g.is_one() {
            RuleTerm::one()
        } else {
            RuleTerm::constant(g)
        }
    }
}

/// Outcome of asking whether a rule eventually stays below a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Eventual {
    /// Strictly below for all `n >= from`.
    Below(u64),
    /// At or above for all `n >= from`, when such a point is known.
    NotBelow(Option<u64>),
}

/// Γ-valued function of `n`, evaluated only where its owner says it applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailRule {
    Zero,
    Term(RuleTerm),
    /// Pointwise maximum.
    Max(Vec<TailRule>),
    /// Explicit values at `start, start + 1, …`; zero elsewhere.
    Table { start: u64, values: Vec<GammaVal> },
    /// `n ↦ scale · max_{i+j = n+shift} left(i)·right(j)`.
    Conv {
        left: Box<Profile>,
        right: Box<Profile>,
        shift: u64,
        scale: GammaVal,
    },
    /// `n ↦ sup_{k >= max(n, from)} inner(k) · ratio^{k-n}`.
    Resum {
        inner: Box<TailRule>,
        ratio: GammaVal,
        from: u64,
    },
}

const SCAN_WINDOW: u64 = 64;
const SCAN_LIMIT: u64 = 100_000;

impl TailRule {
    pub fn max_of(rules: Vec<TailRule>) -> TailRule {
        let mut flat = Vec::new();
        for r in rules {
            match r {
                TailRule::Max(inner) => flat.extend(inner),
                r if r.is_zero() => {}
                r => flat.push(r),
            }
        }
        flat.dedup();
        match flat.len() {
            0 => TailRule::Zero,
            1 => flat.pop().unwrap(),
            _ => TailRule::Max(flat),
        }
    }

    pub fn conv(left: Profile, right: Profile, shift: u64, scale: GammaVal) -> TailRule {
        if left.is_zero() || right.is_zero() || scale.is_zero() {
            return TailRule::Zero;
        }
        TailRule::Conv {
            left: Box::new(left),
            right: Box::new(right),
            shift,
            scale,
        }
    }

    /// Structural zero test.
    pub fn is_zero(&self) -> bool {
        match self {
            TailRule::Zero => true,
            TailRule::Term(_) => false,
            TailRule::Max(rs) => rs.iter().all(TailRule::is_zero),
            TailRule::Table { values, .. } => values.iter().all(GammaVal::is_zero),
            TailRule::Conv {
                left,
                right,
                scale,
                ..
            } => left.is_zero() || right.is_zero() || scale.is_zero(),
            TailRule::Resum { inner, .. } => inner.is_zero(),
        }
    }

    /// First `n` at which the rule is defined.
    pub fn valid_from(&self) -> u64 {
        match self {
            TailRule::Term(t) => t.valid_from(),
            TailRule::Max(rs) => rs.iter().map(TailRule::valid_from).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn eval(&self, n: u64) -> Result<GammaVal> {
        match self {
            TailRule::Zero => Ok(GammaVal::zero()),
            TailRule::Term(t) => t.eval(n),
            TailRule::Max(rs) => {
                let mut best = GammaVal::zero();
                for r in rs {
                    best = best.max(r.eval(n)?);
                }
                Ok(best)
            }
            TailRule::Table { start, values } => Ok(n
                .checked_sub(*start)
                .and_then(|i| values.get(i as usize).cloned())
                .unwrap_or_else(GammaVal::zero)),
            TailRule::Conv {
                left,
                right,
                shift,
                scale,
            } => {
                let m = n + shift;
                let mut best = GammaVal::zero();
                for i in 0..=m {
                    let a = left.at(i)?;
                    if a.is_zero() {
                        continue;
                    }
                    best = best.max(&a * &right.at(m - i)?);
                }
                Ok(&best * scale)
            }
            TailRule::Resum { inner, ratio, from } => {
                let start = n.max(*from);
                if ratio.is_zero() {
                    return if n >= *from {
                        inner.eval(n)
                    } else {
                        Ok(GammaVal::zero())
                    };
                }
                let sup = inner.geometric(ratio).sup_from(start)?;
                Ok(&sup * &ratio.pow(-(n as i64))?)
            }
        }
    }

    /// `n ↦ self(n) · r^n`.
    pub fn geometric(&self, r: &GammaVal) -> TailRule {
        if r.is_zero() {
            return TailRule::Zero;
        }
        match self {
            TailRule::Zero => TailRule::Zero,
            TailRule::Term(t) => TailRule::Term(t.geometric(r)),
            TailRule::Max(rs) => TailRule::max_of(rs.iter().map(|x| x.geometric(r)).collect()),
            TailRule::Table { start, values } => TailRule::Table {
                start: *start,
                values: values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * &r.powu(start + i as u64))
                    .collect(),
            },
            TailRule::Conv {
                left,
                right,
                shift,
                scale,
            } => TailRule::Conv {
                left: Box::new(left.geometric(r)),
                right: Box::new(right.geometric(r)),
                shift: *shift,
                scale: scale * &r.pow(-(*shift as i64)).expect("r is nonzero"),
            },
            TailRule::Resum { inner, ratio, from } => TailRule::Resum {
                inner: Box::new(inner.geometric(r)),
                ratio: ratio.div(r).expect("r is nonzero"),
                from: *from,
            },
        }
    }

    /// `n ↦ c · self(n)`.
    pub fn scale(&self, c: &GammaVal) -> TailRule {
        if c.is_zero() {
            return TailRule::Zero;
        }
        if c.is_one() {
            return self.clone();
        }
        match self {
            TailRule::Zero => TailRule::Zero,
            TailRule::Term(t) => TailRule::Term(t.mul(&RuleTerm::constant(c))),
            TailRule::Max(rs) => TailRule::max_of(rs.iter().map(|x| x.scale(c)).collect()),
            TailRule::Table { start, values } => TailRule::Table {
                start: *start,
                values: values.iter().map(|v| v * c).collect(),
            },
            TailRule::Conv {
                left,
                right,
                shift,
                scale,
            } => TailRule::Conv {
                left: left.clone(),
                right: right.clone(),
                shift: *shift,
                scale: scale * c,
            },
            TailRule::Resum { inner, ratio, from } => TailRule::Resum {
                inner: Box::new(inner.scale(c)),
                ratio: ratio.clone(),
                from: *from,
            },
        }
    }

    /// `n ↦ self(n + k)`.
    pub fn shift(&self, k: u64) -> TailRule {
        if k == 0 {
            return self.clone();
        }
        match self {
            TailRule::Zero => TailRule::Zero,
            TailRule::Term(t) => TailRule::Term(t.shift(k)),
            TailRule::Max(rs) => TailRule::max_of(rs.iter().map(|x| x.shift(k)).collect()),
            TailRule::Table { start, values } => {
                if *start >= k {
                    TailRule::Table {
                        start: start - k,
                        values: values.clone(),
                    }
                } else {
                    let drop = (k - start) as usize;
                    TailRule::Table {
                        start: 0,
                        values: values.iter().skip(drop).cloned().collect(),
                    }
                }
            }
            TailRule::Conv {
                left,
                right,
                shift,
                scale,
            } => TailRule::Conv {
                left: left.clone(),
                right: right.clone(),
                shift: shift + k,
                scale: scale.clone(),
            },
            TailRule::Resum { inner, ratio, from } => TailRule::Resum {
                inner: Box::new(inner.shift(k)),
                ratio: ratio.clone(),
                from: from.saturating_sub(k),
            },
        }
    }

    /// Whether `self(n) < target` for all large `n`, with a threshold.
    pub fn eventually_below(&self, target: &GammaVal) -> Result<Eventual> {
        if target.is_zero() {
            return Ok(Eventual::NotBelow(Some(0)));
        }
        match self {
            TailRule::Zero => Ok(Eventual::Below(0)),
            TailRule::Term(t) => {
                let (n0, ord) = t.eventual_cmp(target)?;
                Ok(if ord == Ordering::Less {
                    Eventual::Below(n0)
                } else {
                    Eventual::NotBelow(Some(n0))
                })
            }
            TailRule::Max(rs) => {
                let mut below = 0;
                let mut witness: Option<u64> = None;
                let mut undecided = false;
                for r in rs {
                    match r.eventually_below(target)? {
                        Eventual::Below(f) => below = below.max(f),
                        Eventual::NotBelow(Some(f)) => {
                            witness = Some(witness.map_or(f, |w| w.min(f)))
                        }
                        Eventual::NotBelow(None) => undecided = true,
                    }
                }
                Ok(match (witness, undecided) {
                    (Some(w), _) => Eventual::NotBelow(Some(w)),
                    (None, true) => Eventual::NotBelow(None),
                    (None, false) => Eventual::Below(below),
                })
            }
            TailRule::Table { start, values } => {
                let last = values.iter().rposition(|v| v >= target);
                Ok(Eventual::Below(last.map_or(0, |i| start + i as u64 + 1)))
            }
            TailRule::Conv {
                left,
                right,
                shift,
                scale,
            } => {
                if self.is_zero() {
                    return Ok(Eventual::Below(0));
                }
                let t = target.div(scale)?;
                let lmax = left.sup()?;
                let rmax = right.sup()?;
                let (Some(i0), Some(j0)) = (
                    left.first_below(&t.div(&rmax)?)?,
                    right.first_below(&t.div(&lmax)?)?,
                ) else {
                    return Ok(Eventual::NotBelow(None));
                };
                Ok(Eventual::Below((i0 + j0).saturating_sub(1 + shift)))
            }
            TailRule::Resum { inner, ratio, from } => {
                if ratio.is_zero() || *ratio <= GammaVal::one() {
                    return Ok(match inner.eventually_below(target)? {
                        Eventual::Below(f) => Eventual::Below(f),
                        Eventual::NotBelow(w) => Eventual::NotBelow(w.map(|f| f.max(*from))),
                    });
                }
                match inner.geometric(ratio).eventually_below(target)? {
                    Eventual::Below(f) => Ok(Eventual::Below(f)),
                    Eventual::NotBelow(_) => Ok(match inner.eventually_below(target)? {
                        Eventual::NotBelow(Some(f)) => Eventual::NotBelow(Some(f.max(*from))),
                        _ => Eventual::NotBelow(None),
                    }),
                }
            }
        }
    }

    /// Least `n >= from` such that `self(k) < target` for every `k >= n`,
    /// or `None` when the rule does not eventually drop below `target`.
    pub fn first_below(&self, target: &GammaVal, from: u64) -> Result<Option<u64>> {
        match self.eventually_below(target)? {
            Eventual::Below(f) => {
                let mut n = f.max(from);
                while n > from && self.eval(n - 1)? < *target {
                    n -= 1;
                }
                Ok(Some(n))
            }
            Eventual::NotBelow(_) => Ok(None),
        }
    }

    /// `sup_{n >= from} self(n)`, certified to be attained.
    pub fn sup_from(&self, from: u64) -> Result<GammaVal> {
        if self.is_zero() {
            return Ok(GammaVal::zero());
        }
        if let TailRule::Table { start, values } = self {
            let skip = from.saturating_sub(*start) as usize;
            return Ok(values
                .iter()
                .skip(skip)
                .cloned()
                .max()
                .unwrap_or_else(GammaVal::zero));
        }
        let from = from.max(self.valid_from());
        let mut best = GammaVal::zero();
        let mut end = from + SCAN_WINDOW;
        let mut n = from;
        loop {
            while n < end {
                best = best.max(self.eval(n)?);
                n += 1;
            }
            if best.is_zero() {
                if end - from >= SCAN_LIMIT {
                    return Err(Error::Depth("tail bound stays zero through the scan".into()));
                }
                end = from + (end - from) * 2;
                continue;
            }
            match self.eventually_below(&best)? {
                Eventual::Below(f) if f <= end => return Ok(best),
                Eventual::Below(f) if f - from <= SCAN_LIMIT => end = f,
                _ => {
                    return Err(Error::Depth(
                        "tail bound is not eventually dominated; its supremum is not certified"
                            .into(),
                    ))
                }
            }
        }
    }
}

/// Uncertainty of every coefficient: `head[n]` for `n < head.len()`, `tail(n)` beyond.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub head: Vec<GammaVal>,
    pub tail: TailRule,
}

impl Profile {
    pub fn zero(len: usize) -> Self {
        Profile {
            head: vec![GammaVal::zero(); len],
            tail: TailRule::Zero,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.head.iter().all(GammaVal::is_zero) && self.tail.is_zero()
    }

    pub fn len(&self) -> usize {
        self.head.len()
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_empty()
    }

    pub fn at(&self, n: u64) -> Result<GammaVal> {
        match self.head.get(n as usize) {
            Some(v) => Ok(v.clone()),
            None => self.tail.eval(n),
        }
    }

    pub fn sup(&self) -> Result<GammaVal> {
        let h = self.head.iter().cloned().max().unwrap_or_else(GammaVal::zero);
        Ok(h.max(self.tail.sup_from(self.head.len() as u64)?))
    }

    /// `sup_{n >= from} self(n)`.
    pub fn sup_from(&self, from: usize) -> Result<GammaVal> {
        let h = self.head.iter().skip(from).cloned().max().unwrap_or_else(GammaVal::zero);
        let start = self.head.len().max(from) as u64;
        Ok(h.max(self.tail.sup_from(start)?))
    }

    /// Some `n` with `self(k) < target` for every `k >= n`, or `None`.
    pub fn first_below(&self, target: &GammaVal) -> Result<Option<u64>> {
        let len = self.head.len() as u64;
        let Some(t) = self.tail.first_below(target, len)? else {
            return Ok(None);
        };
        if t > len {
            return Ok(Some(t));
        }
        let last = self.head.iter().rposition(|v| v >= target);
        Ok(Some(last.map_or(0, |i| i as u64 + 1)))
    }

    pub fn geometric(&self, r: &GammaVal) -> Profile {
        Profile {
            head: self
                .head
                .iter()
                .enumerate()
                .map(|(i, v)| v * &r.powu(i as u64))
                .collect(),
            tail: self.tail.geometric(r),
        }
    }

    pub fn scale(&self, c: &GammaVal) -> Profile {
        Profile {
            head: self.head.iter().map(|v| v * c).collect(),
            tail: self.tail.scale(c),
        }
    }

    /// Pointwise max, re-split at `len`, which must be at least both lengths.
    pub fn max_with(&self, other: &Profile, len: usize) -> Result<Profile> {
        let mut head = Vec::with_capacity(len);
        for n in 0..len as u64 {
            head.push(self.at(n)?.max(other.at(n)?));
        }
        Ok(Profile {
            head,
            tail: TailRule::max_of(vec![self.tail.clone(), other.tail.clone()]),
        })
    }

    /// The whole profile as a single rule valid from `0`.
    pub fn as_rule(&self) -> TailRule {
        let head_rule = TailRule::Table {
            start: 0,
            values: self.head.clone(),
        };
        TailRule::max_of(vec![head_rule, self.tail.clone()])
    }
}
