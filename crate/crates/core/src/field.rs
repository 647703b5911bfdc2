//! Elements of `F_∞ = ℚ(X_1, X_2, …)` with the non-Archimedean order in which
//! each `X_{n+1}` exceeds every element of `F_n`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gamma::GammaVal;
use crate::poly::{gcd, Coeff, Monomial, Poly, Sign};

/// Reduced quotient `num / den`: coprime, `den` has leading coefficient `1`
/// in the antilex order (so it is positive), and zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    num: Poly,
    den: Poly,
}

impl FieldElem {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return FieldElem::zero();
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff().recip();
        FieldElem {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    /// Already coprime parts; only the denominator's leading coefficient is fixed.
    fn monic_den(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return FieldElem::zero();
        }
        let lc = den.leading_coeff().recip();
        FieldElem {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn zero() -> Self {
        FieldElem {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        FieldElem {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(Poly::from_int(n))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `X_n`.
    pub fn var(n: u32) -> Self {
        Self::from_poly(Poly::var(n))
    }

    /// `c · X^α` for a possibly negative exponent vector.
    pub fn monomial(c: Coeff, exps: &[(u32, i64)]) -> Self {
        let mut up = Vec::new();
        let mut down = Vec::new();
        for (i, e) in exps {
            let slot = *i as usize - 1;
            let target = if *e >= 0 { &mut up } else { &mut down };
            if target.len() <= slot {
                target.resize(slot + 1, 0);
            }
            target[slot] += e.unsigned_abs() as u32;
        }
        Self::normalized(
            Poly::monomial(Monomial::from_exponents(up), c),
            Poly::monomial(Monomial::from_exponents(down), Coeff::one()),
        )
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_rational(&self) -> Option<Coeff> {
        if self.den.is_constant() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn max_var(&self) -> u32 {
        self.num.max_var().max(self.den.max_var())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        let lc = self.num.leading_coeff().recip();
        Ok(FieldElem {
            num: self.den.scale(&lc),
            den: self.num.scale(&lc),
        })
    }

    pub fn div(&self, other: &FieldElem) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let k = u32::try_from(k).map_err(|_| Error::domain("exponent too large"))?;
        Ok(FieldElem {
            num: self.num.pow(k),
            den: self.den.pow(k),
        })
    }

    pub fn powu(&self, k: u32) -> Self {
        FieldElem {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return FieldElem::zero();
        }
        FieldElem {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Sign in the ordered field. The denominator is positive, so this is
    /// the sign of the numerator.
    pub fn sign(&self) -> Sign {
        self.num.sign()
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Sign::Negative {
            -self
        } else {
            self.clone()
        }
    }

    /// `v(num) · v(den)^{-1}`.
    pub fn valuation(&self) -> GammaVal {
        if self.is_zero() {
            return GammaVal::zero();
        }
        &self.num.valuation() * &self.den.valuation().inv().expect("nonzero denominator")
    }

    /// Evaluates with rational values substituted for `X_1, …`.
    pub fn eval_rational(&self, point: &[Coeff]) -> Result<Coeff> {
        let d = self.den.eval_rational(point);
        if d.is_zero() {
            return Err(Error::domain("denominator vanishes at the evaluation point"));
        }
        Ok(self.num.eval_rational(point) / d)
    }
}

impl Default for FieldElem {
    fn default() -> Self {
        FieldElem::zero()
    }
}

impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).sign().to_ordering()
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;

    fn add(self, rhs: &FieldElem) -> FieldElem {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return FieldElem::normalized(&self.num + &rhs.num, self.den.clone());
        }
        // Henrici: only the common part of the denominators can cancel
        let g = gcd(&self.den, &rhs.den);
        if g.is_constant() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return FieldElem::monic_den(num, &self.den * &rhs.den);
        }
        let bg = self.den.exact_div(&g).expect("gcd divides");
        let dg = rhs.den.exact_div(&g).expect("gcd divides");
        let t = &(&self.num * &dg) + &(&rhs.num * &bg);
        if t.is_zero() {
            return FieldElem::zero();
        }
        let g2 = gcd(&t, &g);
        if g2.is_constant() {
            return FieldElem::monic_den(t, &bg * &rhs.den);
        }
        let num = t.exact_div(&g2).expect("gcd divides");
        let d2 = rhs.den.exact_div(&g2).expect("gcd divides");
        FieldElem::monic_den(num, &bg * &d2)
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;

    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self + &(-rhs)
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        FieldElem {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;

    fn mul(self, rhs: &FieldElem) -> FieldElem {
        if self.is_zero() || rhs.is_zero() {
            return FieldElem::zero();
        }
        // Cross-cancel first so the products stay small.
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.exact_div(&g1).expect("gcd divides");
        let d2 = rhs.den.exact_div(&g1).expect("gcd divides");
        let n2 = rhs.num.exact_div(&g2).expect("gcd divides");
        let d1 = self.den.exact_div(&g2).expect("gcd divides");
        let den = &d1 * &d2;
        let lc = den.leading_coeff().recip();
        FieldElem {
            num: (&n1 * &n2).scale(&lc),
            den: den.scale(&lc),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        -&self
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_field(self))
    }
}
