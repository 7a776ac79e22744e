use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{mod_inverse, uni, Poly};
use super::{Base, PolyRing, RingError};

/// An element of the fraction field, stored as a normalized fraction.
///
/// Normal form: denominator nonzero; numerator zero implies denominator 1;
/// common monomial factors cancelled; over ℤ the common integer content is
/// removed and the denominator's leading coefficient is positive; over 𝔽ₚ
/// the denominator is monic.  Full polynomial gcd cancellation happens when
/// numerator and denominator together involve at most one variable, and
/// exact quotients are always detected.  Elements of Laurent polynomial
/// rings therefore have a unique representation; in general equality is
/// decided by cross-multiplication.
#[derive(Clone)]
pub struct RingElem {
    num: Poly,
    den: Poly,
}

impl RingElem {
    pub fn from_poly(p: Poly) -> RingElem {
        let den = Poly::one(p.ring());
        RingElem { num: p, den }
    }

    /// Build and normalize `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<RingElem, RingError> {
        if den.is_zero() {
            return Err(RingError::ZeroDenominator);
        }
        Ok(normalize(num, den))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.num.ring()
    }

    pub fn base(&self) -> Base {
        self.num.base()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// `1/self`, `None` for zero.
    pub fn inv(&self) -> Option<RingElem> {
        if self.is_zero() {
            None
        } else {
            Some(normalize(self.den.clone(), self.num.clone()))
        }
    }

    pub fn checked_div(&self, other: &RingElem) -> Result<RingElem, RingError> {
        if other.is_zero() {
            return Err(RingError::ZeroDenominator);
        }
        Ok(normalize(self.num.mul(&other.den), self.den.mul(&other.num)))
    }

    pub fn pow(&self, e: i64) -> RingElem {
        if e >= 0 {
            let e = e as u32;
            RingElem { num: self.num.pow(e), den: self.den.pow(e) }
        } else {
            self.inv()
                .expect("negative power of zero")
                .pow(-e)
        }
    }

    /// Every variable with a nonzero exponent in numerator or denominator.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.num.support();
        for v in self.den.support() {
            if !s.contains(&v) {
                s.push(v);
            }
        }
        s.sort_unstable();
        s
    }

    /// Move into another ring, mapping variables by name.
    pub fn embed(&self, target: &Arc<PolyRing>) -> Option<RingElem> {
        let num = self.num.embed(target)?;
        let den = self.den.embed(target)?;
        RingElem::new(num, den).ok()
    }

    /// Evaluate in ℤ/m (m prime); `None` if the denominator vanishes.
    pub fn eval_mod(&self, point: &[u64], m: u64) -> Option<u64> {
        let d = self.den.eval_mod(point, m);
        if d == 0 {
            return None;
        }
        let n = self.num.eval_mod(point, m);
        let inv = mod_inverse(&BigInt::from(d), m)?;
        let inv: u64 = inv.try_into().ok()?;
        Some(((n as u128 * inv as u128) % m as u128) as u64)
    }

    /// Laurent-monomial test: `Some((c, exps))` with `self = c · ∏ xᵢ^{eᵢ}`.
    pub fn as_laurent_term(&self) -> Option<(BigInt, Vec<i64>)> {
        let (nc, nm) = self.num.as_term()?;
        let (dc, dm) = self.den.as_term()?;
        let c = match self.base() {
            Base::Integers => {
                let (q, r) = nc.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                q
            }
            Base::PrimeField(p) => (nc * mod_inverse(dc, p)?).mod_floor(&BigInt::from(p)),
        };
        Some((c, nm.iter().zip(dm).map(|(a, b)| *a as i64 - *b as i64).collect()))
    }
}

fn normalize(num: Poly, den: Poly) -> RingElem {
    debug_assert!(!den.is_zero());
    let ring = num.ring().clone();
    if num.is_zero() {
        return RingElem { num, den: Poly::one(&ring) };
    }
    if den.is_one() {
        return RingElem { num, den };
    }
    if let Some(q) = num.div_exact(&den) {
        return RingElem { num: q, den: Poly::one(&ring) };
    }
    let (mut num, mut den) = (num, den);
    if let Some(q) = den.div_exact(&num) {
        num = Poly::one(&ring);
        den = q;
    }
    let mn = num.monomial_content();
    let md = den.monomial_content();
    let common: Vec<u32> = mn.iter().zip(&md).map(|(a, b)| (*a).min(*b)).collect();
    if common.iter().any(|&e| e > 0) {
        num = num.unshift(&common);
        den = den.unshift(&common);
    }
    let mut sup = num.support();
    for v in den.support() {
        if !sup.contains(&v) {
            sup.push(v);
        }
    }
    if sup.len() == 1 && den.num_terms() > 1 {
        let var = sup[0];
        let g = match ring.base {
            Base::Integers => uni::gcd_integers(&num, &den, var),
            Base::PrimeField(p) => uni::ext_gcd_field(&num, &den, var, p).0,
        };
        if g.degree_in(var).unwrap_or(0) > 0 {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.div_exact(&g).expect("gcd divides denominator");
        }
    }
    match ring.base {
        Base::Integers => {
            let g = num.content().gcd(&den.content());
            if !g.is_one() {
                num = num.div_scalar(&g);
                den = den.div_scalar(&g);
            }
            if den.leading_coeff().is_negative() {
                num = num.neg();
                den = den.neg();
            }
        }
        Base::PrimeField(_) => {
            let lc = den.leading_coeff();
            if !lc.is_one() {
                num = num.div_scalar(&lc);
                den = den.div_scalar(&lc);
            }
        }
    }
    RingElem { num, den }
}

impl PartialEq for RingElem {
    fn eq(&self, other: &RingElem) -> bool {
        if self.num == other.num && self.den == other.den {
            return true;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RingElem {}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let den = match self.den.as_term() {
            Some((c, m)) if c.is_one() && m.iter().filter(|&&e| e > 0).count() == 1 => self.den.to_string(),
            Some((_, m)) if m.iter().all(|&e| e == 0) => self.den.to_string(),
            _ => format!("({})", self.den),
        };
        write!(f, "{}/{}", self.num.fmt_with_parens(), den)
    }
}

impl<'a> Add<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return normalize(self.num.add(&rhs.num), self.den.clone());
        }
        normalize(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl<'a> Sub<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        if self.is_zero() || rhs.is_zero() {
            return RingElem::from_poly(Poly::zero(self.ring()));
        }
        if self.is_polynomial() && rhs.is_polynomial() {
            return RingElem::from_poly(self.num.mul(&rhs.num));
        }
        normalize(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl<'a> Div<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    /// Panics on division by zero, like integer division.
    fn div(self, rhs: &RingElem) -> RingElem {
        self.checked_div(rhs).expect("division by zero ring element")
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem { num: self.num.neg(), den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RingElem> for RingElem {
            type Output = RingElem;
            fn $m(self, rhs: RingElem) -> RingElem {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a RingElem> for RingElem {
            type Output = RingElem;
            fn $m(self, rhs: &RingElem) -> RingElem {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<RingElem> for &'a RingElem {
            type Output = RingElem;
            fn $m(self, rhs: RingElem) -> RingElem {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

impl RingElem {
    pub fn is_negative_constant(&self) -> bool {
        self.as_integer().is_some_and(|c| c.is_negative())
    }

    pub fn one_like(&self) -> RingElem {
        RingElem::from_poly(Poly::one(self.ring()))
    }

    pub fn zero_like(&self) -> RingElem {
        RingElem::from_poly(Poly::zero(self.ring()))
    }

    pub fn int_like(&self, c: i64) -> RingElem {
        RingElem::from_poly(Poly::constant(self.ring(), BigInt::from(c)))
    }

    pub fn is_unit_constant(&self) -> bool {
        match self.as_integer() {
            Some(c) => match self.base() {
                Base::Integers => c.abs().is_one(),
                Base::PrimeField(_) => !c.is_zero(),
            },
            None => false,
        }
    }
}
