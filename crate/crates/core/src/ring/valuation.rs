use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::poly::Poly;
use super::primes::is_prime_supported;
use super::{Primality, RingElem, RingError, RingSpec};

/// Value of a discrete valuation: an integer, or +∞ for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Finite(i64),
    Infinite,
}

impl Val {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Finite(n) => Some(n),
            Val::Infinite => None,
        }
    }

    pub fn at_least(self, n: i64) -> bool {
        self >= Val::Finite(n)
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinite,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(n) => write!(f, "{n}"),
            Val::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PrimeShape {
    Variable(usize),
    Integer(BigInt),
    General,
}

/// The π-adic valuation on the fraction field for a prime π of the
/// polynomial ring underlying `spec`.
///
/// Assumption (A) (`⋂ πⁿR = 0`) holds for every supported ring because they
/// are all noetherian, so it is not checked at runtime.
#[derive(Debug, Clone)]
pub struct Valuation {
    pi: RingElem,
    spec: RingSpec,
    shape: PrimeShape,
    primality: Primality,
}

impl Valuation {
    /// Requires `pi` to be verified prime by [`is_prime_supported`].
    pub fn new(spec: &RingSpec, pi: &RingElem) -> Result<Valuation, RingError> {
        let pi = pi
            .embed(spec.ring())
            .ok_or_else(|| RingError::NotInRing(spec.to_string()))?;
        if !is_prime_supported(&pi, &spec.polynomial_ring())? {
            return Err(RingError::NotPrime(pi.to_string()));
        }
        Ok(Valuation::build(spec, pi, Primality::Verified))
    }

    /// Accept `pi` as prime without a decision procedure.  Only non-units
    /// that are polynomials are allowed.
    pub fn asserted(spec: &RingSpec, pi: &RingElem) -> Result<Valuation, RingError> {
        let pi = pi
            .embed(spec.ring())
            .ok_or_else(|| RingError::NotInRing(spec.to_string()))?;
        if !pi.is_polynomial() || pi.is_zero() || pi.is_unit_constant() {
            return Err(RingError::NotPrime(pi.to_string()));
        }
        Ok(Valuation::build(spec, pi, Primality::Asserted))
    }

    fn build(spec: &RingSpec, pi: RingElem, primality: Primality) -> Valuation {
        let poly = pi.numer();
        let shape = if let Some(c) = poly.as_constant() {
            PrimeShape::Integer(c)
        } else if let Some((c, m)) = poly.as_term() {
            let deg: u32 = m.iter().sum();
            if deg == 1 && pi.is_polynomial() && RingElem::from_poly(Poly::constant(poly.ring(), c.clone())).is_unit_constant() {
                PrimeShape::Variable(m.iter().position(|&e| e == 1).unwrap())
            } else {
                PrimeShape::General
            }
        } else {
            PrimeShape::General
        };
        Valuation { pi, spec: spec.clone(), shape, primality }
    }

    pub fn pi(&self) -> &RingElem {
        &self.pi
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn primality(&self) -> Primality {
        self.primality
    }

    /// Index of π when π is (a unit times) a variable.
    pub fn variable(&self) -> Option<usize> {
        match self.shape {
            PrimeShape::Variable(i) => Some(i),
            _ => None,
        }
    }

    /// π when π is an integer prime.
    pub fn integer_prime(&self) -> Option<&BigInt> {
        match &self.shape {
            PrimeShape::Integer(c) => Some(c),
            _ => None,
        }
    }

    /// Valuation of a nonzero polynomial.
    pub fn of_poly(&self, p: &Poly) -> Val {
        if p.is_zero() {
            return Val::Infinite;
        }
        match &self.shape {
            PrimeShape::Variable(i) => Val::Finite(p.min_degree_in(*i).unwrap() as i64),
            PrimeShape::Integer(q) => {
                let v = p
                    .terms()
                    .map(|(_, c)| integer_valuation(c, q))
                    .min()
                    .unwrap();
                Val::Finite(v)
            }
            PrimeShape::General => {
                let mut n = 0;
                let mut cur = p.clone();
                while let Some(q) = cur.div_exact(self.pi.numer()) {
                    cur = q;
                    n += 1;
                }
                Val::Finite(n)
            }
        }
    }

    /// `v(n/d) = v(n) − v(d)`, with `v(0) = ∞`.
    pub fn of(&self, e: &RingElem) -> Val {
        if e.is_zero() {
            return Val::Infinite;
        }
        let e = self.coerce(e);
        match (self.of_poly(e.numer()), self.of_poly(e.denom())) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a - b),
            _ => unreachable!("nonzero numerator and denominator"),
        }
    }

    pub fn in_valuation_ring(&self, e: &RingElem) -> bool {
        self.of(e).at_least(0)
    }

    pub fn in_maximal_ideal(&self, e: &RingElem) -> bool {
        self.of(e).at_least(1)
    }

    pub fn is_unit(&self, e: &RingElem) -> bool {
        self.of(e) == Val::Finite(0)
    }

    /// π^n as a field element (n may be negative).
    pub fn pi_pow(&self, n: i64) -> RingElem {
        self.pi.pow(n)
    }

    /// Representation `(num, den)` of `e` with `v(den) = 0`.
    pub fn integral_fraction(&self, e: &RingElem) -> (Poly, Poly) {
        let e = self.coerce(e);
        let mut num = e.numer().clone();
        let mut den = e.denom().clone();
        if self.of_poly(&den) == Val::Finite(0) {
            return (num, den);
        }
        let pi = self.pi.numer();
        while let Some(q) = den.div_exact(pi) {
            den = q;
            match num.div_exact(pi) {
                Some(qn) => num = qn,
                None => {
                    // e has negative valuation; leave the excess in den
                    den = den.mul(pi);
                    break;
                }
            }
        }
        (num, den)
    }

    fn coerce(&self, e: &RingElem) -> RingElem {
        if std::sync::Arc::ptr_eq(e.ring(), self.spec.ring()) || **e.ring() == **self.spec.ring() {
            e.clone()
        } else {
            e.embed(self.spec.ring())
                .unwrap_or_else(|| panic!("{e} is not in {}", self.spec))
        }
    }
}

impl PartialEq for Valuation {
    fn eq(&self, other: &Valuation) -> bool {
        self.pi == other.pi && self.spec == other.spec
    }
}

fn integer_valuation(c: &BigInt, q: &BigInt) -> i64 {
    let mut n = 0;
    let mut c = c.clone();
    loop {
        let (d, r) = c.div_rem(q);
        if !r.is_zero() {
            return n;
        }
        c = d;
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Base;

    #[test]
    fn examples() {
        let zst = RingSpec::polynomial(Base::Integers, &["s", "t"]).unwrap();
        let v = Valuation::new(&zst, &zst.var("t")).unwrap();
        assert_eq!(v.of(&zst.zero()), Val::Infinite);
        let s = zst.var("s");
        let t = zst.var("t");
        assert_eq!(v.of(&(&s * &t * &t + &t * &t * &t)), Val::Finite(2));
        assert_eq!(v.of(&(zst.one() / &t)), Val::Finite(-1));

        let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
        let v2 = Valuation::new(&z, &z.int(2)).unwrap();
        assert_eq!(v2.of(&(z.int(12) / z.int(5))), Val::Finite(2));
        assert_eq!(v2.of(&(z.int(3) / z.int(8))), Val::Finite(-3));
    }

    #[test]
    fn general_prime_by_division() {
        let f3 = RingSpec::polynomial(Base::PrimeField(3), &["u"]).unwrap();
        let u = f3.var("u");
        let pi = &u * &u + f3.one();
        let v = Valuation::new(&f3, &pi).unwrap();
        let e = &pi * &pi * (&u + f3.one()) / (&u * &pi);
        assert_eq!(v.of(&e), Val::Finite(1));
    }

    #[test]
    fn composite_rejected() {
        let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
        assert!(matches!(Valuation::new(&z, &z.int(6)), Err(RingError::NotPrime(_))));
    }
}
