//! The value group: finitely supported integer exponent vectors under
//! componentwise multiplication and antilexicographic order, with an adjoined
//! absorbing minimum `0`.
//!
//! `ĝ_n` is the vector with a single `1` at index `n`. The real generators
//! behind each cyclic factor never matter, only the exponents do.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Zero,
    /// Index (>= 1) to nonzero exponent.
    Group(BTreeMap<u32, i64>),
}

/// Element of `Γ ∪ {0}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GammaVal(Repr);

impl GammaVal {
    pub fn zero() -> Self {
        GammaVal(Repr::Zero)
    }

    pub fn one() -> Self {
        GammaVal(Repr::Group(BTreeMap::new()))
    }

    /// `ĝ_n`. Panics if `n == 0`.
    pub fn generator(n: u32) -> Self {
        assert!(n >= 1, "generator index must be >= 1");
        GammaVal(Repr::Group(BTreeMap::from([(n, 1)])))
    }

    /// `ĝ_n^k`.
    pub fn generator_pow(n: u32, k: i64) -> Self {
        assert!(n >= 1, "generator index must be >= 1");
        let mut map = BTreeMap::new();
        if k != 0 {
            map.insert(n, k);
        }
        GammaVal(Repr::Group(map))
    }

    /// Builds a group element from `(index, exponent)` pairs. Repeated indices
    /// accumulate and zero exponents are dropped.
    pub fn from_exponents<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, i64)>,
    {
        let mut map = BTreeMap::new();
        for (index, exp) in pairs {
            if index < 1 {
                return Err(Error::parse(1, 1, "gamma index must be >= 1"));
            }
            *map.entry(index).or_insert(0) += exp;
        }
        map.retain(|_, e| *e != 0);
        Ok(GammaVal(Repr::Group(map)))
    }

    /// List form: entry `i` is the exponent at index `i + 1`.
    pub fn from_list(list: &[i64]) -> Self {
        let map = list
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != 0)
            .map(|(i, e)| (i as u32 + 1, *e))
            .collect();
        GammaVal(Repr::Group(map))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Group(m) if m.is_empty())
    }

    /// Exponent at `index`; `None` for the zero element.
    pub fn exponent(&self, index: u32) -> Option<i64> {
        match &self.0 {
            Repr::Zero => None,
            Repr::Group(m) => Some(m.get(&index).copied().unwrap_or(0)),
        }
    }

    /// Nonzero exponents in increasing index order. Empty for `0` and `1`.
    pub fn exponents(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        let map = match &self.0 {
            Repr::Zero => None,
            Repr::Group(m) => Some(m),
        };
        map.into_iter().flat_map(|m| m.iter().map(|(i, e)| (*i, *e)))
    }

    /// Largest index with a nonzero exponent, `0` for the identity and for `0`.
    pub fn max_support(&self) -> u32 {
        match &self.0 {
            Repr::Zero => 0,
            Repr::Group(m) => m.keys().next_back().copied().unwrap_or(0),
        }
    }

    /// Membership in the convex subgroup `H_m`.
    pub fn in_convex_subgroup(&self, m: u32) -> bool {
        !self.is_zero() && self.max_support() <= m
    }

    /// Dense exponent list over indices `1..=max_support`; `None` for `0`.
    pub fn to_list(&self) -> Option<Vec<i64>> {
        match &self.0 {
            Repr::Zero => None,
            Repr::Group(m) => {
                let top = self.max_support() as usize;
                let mut out = vec![0; top];
                for (i, e) in m {
                    out[*i as usize - 1] = *e;
                }
                Some(out)
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.0 {
            Repr::Zero => Err(Error::domain("the zero value has no inverse")),
            Repr::Group(m) => Ok(GammaVal(Repr::Group(
                m.iter().map(|(i, e)| (*i, -e)).collect(),
            ))),
        }
    }

    /// `self^k`. `0^k` is `0` for `k > 0`, `1` for `k == 0`, and an error for `k < 0`.
    pub fn pow(&self, k: i64) -> Result<Self> {
        match &self.0 {
            Repr::Zero if k > 0 => Ok(GammaVal::zero()),
            Repr::Zero if k == 0 => Ok(GammaVal::one()),
            Repr::Zero => Err(Error::domain("negative power of the zero value")),
            Repr::Group(m) => {
                let map = if k == 0 {
                    BTreeMap::new()
                } else {
                    m.iter().map(|(i, e)| (*i, e * k)).collect()
                };
                Ok(GammaVal(Repr::Group(map)))
            }
        }
    }

    /// `self^k` for `k >= 0`; never fails.
    pub fn powu(&self, k: u64) -> Self {
        self.pow(k as i64).expect("nonnegative power is total")
    }

    pub fn div(&self, other: &GammaVal) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn max(self, other: GammaVal) -> GammaVal {
        std::cmp::max(self, other)
    }
}

impl Mul for &GammaVal {
    type Output = GammaVal;

    fn mul(self, rhs: &GammaVal) -> GammaVal {
        match (&self.0, &rhs.0) {
            (Repr::Zero, _) | (_, Repr::Zero) => GammaVal::zero(),
            (Repr::Group(a), Repr::Group(b)) => {
                let mut out = a.clone();
                for (i, e) in b {
                    let slot = out.entry(*i).or_insert(0);
                    *slot += e;
                    if *slot == 0 {
                        out.remove(i);
                    }
                }
                GammaVal(Repr::Group(out))
            }
        }
    }
}

impl Mul for GammaVal {
    type Output = GammaVal;

    fn mul(self, rhs: GammaVal) -> GammaVal {
        &self * &rhs
    }
}

impl Ord for GammaVal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Zero, Repr::Zero) => Ordering::Equal,
            (Repr::Zero, _) => Ordering::Less,
            (_, Repr::Zero) => Ordering::Greater,
            (Repr::Group(a), Repr::Group(b)) => {
                // Decided at the largest index where the exponents differ.
                let mut ia = a.iter().rev().peekable();
                let mut ib = b.iter().rev().peekable();
                loop {
                    match (ia.peek(), ib.peek()) {
                        (None, None) => return Ordering::Equal,
                        (Some((_, ea)), None) => return ea.cmp(&&0),
                        (None, Some((_, eb))) => return 0.cmp(*eb),
                        (Some((ka, ea)), Some((kb, eb))) => match ka.cmp(kb) {
                            Ordering::Greater => return ea.cmp(&&0),
                            Ordering::Less => return 0.cmp(*eb),
                            Ordering::Equal => {
                                if ea != eb {
                                    return ea.cmp(eb);
                                }
                                ia.next();
                                ib.next();
                            }
                        },
                    }
                }
            }
        }
    }
}

impl PartialOrd for GammaVal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GammaVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Zero => f.write_str("0v"),
            Repr::Group(m) if m.is_empty() => f.write_str("1"),
            Repr::Group(m) => {
                for (k, (i, e)) in m.iter().enumerate() {
                    if k > 0 {
                        f.write_str("*")?;
                    }
                    if *e == 1 {
                        write!(f, "g{i}")?;
                    } else {
                        write!(f, "g{i}^{e}")?;
                    }
                }
                Ok(())
            }
        }
    }
}
