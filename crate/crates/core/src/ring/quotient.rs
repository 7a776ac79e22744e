use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{uni, Poly};
use super::{Base, RingElem, RingError, RingSpec, Val, Valuation};

/// The residue ring `R/πR` of the polynomial ring underlying a valuation.
#[derive(Debug, Clone)]
pub enum QuotientRing {
    /// π is a variable: `R/πR` is the polynomial ring in the other variables,
    /// represented inside `R` with that variable set to zero.
    SubstituteZero { spec: RingSpec, var: usize },
    /// π is an integer prime `p`: `R/πR = 𝔽ₚ[vars]`.
    ModInteger { p: u64, source: RingSpec, target: RingSpec },
    /// π is an irreducible polynomial of 𝔽ₚ[u]: `R/πR` is a finite field,
    /// elements represented by remainders of degree < deg π.
    ModPolynomial { spec: RingSpec, modulus: Poly, var: usize, p: u64 },
}

/// Image of an element in `R/πR`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    pub value: RingElem,
}

impl QuotientRing {
    pub fn of(v: &Valuation) -> Result<QuotientRing, RingError> {
        let spec = v.spec().polynomial_ring();
        if let Some(var) = v.variable() {
            return Ok(QuotientRing::SubstituteZero { spec, var });
        }
        if let Some(c) = v.integer_prime() {
            let p = c
                .abs()
                .to_u64()
                .ok_or_else(|| RingError::UnsupportedQuotient(format!("prime {c} too large")))?;
            let target = RingSpec::new(Base::PrimeField(p), spec.variables().to_vec(), Vec::new())?;
            return Ok(QuotientRing::ModInteger { p, source: spec, target });
        }
        if let (Base::PrimeField(p), 1) = (spec.base(), spec.variables().len()) {
            let modulus = v.pi().numer().clone();
            return Ok(QuotientRing::ModPolynomial { spec, modulus, var: 0, p });
        }
        Err(RingError::UnsupportedQuotient(format!(
            "no residue representation for {}/({})",
            spec,
            v.pi()
        )))
    }

    /// Ring in which residue values are represented.
    pub fn value_spec(&self) -> &RingSpec {
        match self {
            QuotientRing::SubstituteZero { spec, .. } => spec,
            QuotientRing::ModInteger { target, .. } => target,
            QuotientRing::ModPolynomial { spec, .. } => spec,
        }
    }

    /// Variables that survive in the quotient.
    fn free_vars(&self) -> Vec<usize> {
        match self {
            QuotientRing::SubstituteZero { spec, var } => {
                (0..spec.variables().len()).filter(|i| i != var).collect()
            }
            QuotientRing::ModInteger { target, .. } => (0..target.variables().len()).collect(),
            QuotientRing::ModPolynomial { .. } => Vec::new(),
        }
    }

    pub fn is_field(&self) -> bool {
        match self {
            QuotientRing::ModPolynomial { .. } => true,
            QuotientRing::ModInteger { .. } => self.free_vars().is_empty(),
            QuotientRing::SubstituteZero { spec, .. } => {
                matches!(spec.base(), Base::PrimeField(_)) && self.free_vars().is_empty()
            }
        }
    }

    /// Number of elements, when finite and small enough to count.
    pub fn size(&self) -> Option<u64> {
        match self {
            QuotientRing::ModPolynomial { modulus, var, p, .. } => {
                p.checked_pow(modulus.degree_in(*var).unwrap_or(0))
            }
            _ if self.is_field() => Some(self.value_spec().base().characteristic()),
            _ => None,
        }
    }

    /// Canonical residue representatives, when the quotient is finite.
    pub fn residues(&self) -> Option<Vec<RingElem>> {
        let size = self.size()?;
        let spec = self.value_spec();
        match self {
            QuotientRing::ModPolynomial { modulus, var, p, .. } => {
                let deg = modulus.degree_in(*var).unwrap_or(0);
                Some(
                    (0..size)
                        .map(|idx| {
                            let mut k = idx;
                            let cs: Vec<BigInt> = (0..deg)
                                .map(|_| {
                                    let c = BigInt::from(k % p);
                                    k /= p;
                                    c
                                })
                                .collect();
                            RingElem::from_poly(uni::from_coeffs(spec.ring(), *var, &cs))
                        })
                        .collect(),
                )
            }
            _ => Some((0..size as i64).map(|c| spec.int(c)).collect()),
        }
    }

    /// Image of an integral element.
    pub fn reduce(&self, v: &Valuation, e: &RingElem) -> Result<Residue, RingError> {
        match v.of(e) {
            Val::Finite(n) if n < 0 => return Err(RingError::NotIntegral),
            Val::Infinite => {
                return Ok(Residue { value: self.value_spec().zero() });
            }
            _ => {}
        }
        let (num, den) = v.integral_fraction(e);
        let value = match self {
            QuotientRing::SubstituteZero { var, .. } => {
                RingElem::new(num.substitute_zero(*var), den.substitute_zero(*var))?
            }
            QuotientRing::ModInteger { target, .. } => RingElem::new(
                num.reduce_coefficients(target.ring()),
                den.reduce_coefficients(target.ring()),
            )?,
            QuotientRing::ModPolynomial { .. } => {
                let n = self.canon_poly(&num);
                let dinv = self
                    .inverse(&RingElem::from_poly(den))
                    .ok_or(RingError::NotIntegral)?;
                self.canon(&(RingElem::from_poly(n) * dinv))
            }
        };
        Ok(Residue { value })
    }

    fn canon_poly(&self, p: &Poly) -> Poly {
        match self {
            QuotientRing::ModPolynomial { modulus, var, p: q, .. } => {
                uni::divrem_field(p, modulus, *var, *q).1
            }
            _ => p.clone(),
        }
    }

    /// Canonical representative of a residue value.
    pub fn canon(&self, a: &RingElem) -> RingElem {
        match self {
            QuotientRing::ModPolynomial { .. } => {
                let inv = self
                    .inverse(&RingElem::from_poly(a.denom().clone()))
                    .expect("denominator invertible in the residue field");
                let n = self.canon_poly(a.numer());
                RingElem::from_poly(self.canon_poly(&n.mul(inv.numer())))
            }
            _ => a.clone(),
        }
    }

    pub fn add(&self, a: &Residue, b: &Residue) -> Residue {
        Residue { value: self.canon(&(&a.value + &b.value)) }
    }

    pub fn mul(&self, a: &Residue, b: &Residue) -> Residue {
        Residue { value: self.canon(&(&a.value * &b.value)) }
    }

    /// Inverse in a residue field.  `None` for zero or outside fields.
    pub fn inverse(&self, a: &RingElem) -> Option<RingElem> {
        if a.is_zero() {
            return None;
        }
        match self {
            QuotientRing::ModPolynomial { modulus, var, p, .. } => {
                if !a.is_polynomial() {
                    let n = self.inverse(&RingElem::from_poly(a.numer().clone()))?;
                    return Some(self.canon(&(n * RingElem::from_poly(a.denom().clone()))));
                }
                let r = self.canon_poly(a.numer());
                let (d, s, _) = uni::ext_gcd_field(&r, modulus, *var, *p);
                if !d.is_one() {
                    return None;
                }
                Some(RingElem::from_poly(self.canon_poly(&s)))
            }
            _ if self.is_field() => a.inv(),
            _ => None,
        }
    }

    /// Bezout data `(d, c1, c2)` with `c1·a + c2·b = d` and `(a, b) = (d)`,
    /// for the Bezout quotients with a constructive gcd: fields, ℤ and 𝔽ₚ[u].
    pub fn ext_gcd(&self, a: &RingElem, b: &RingElem) -> Result<(RingElem, RingElem, RingElem), RingError> {
        let spec = self.value_spec();
        if self.is_field() {
            return Ok(if !a.is_zero() {
                (spec.one(), self.inverse(a).unwrap(), spec.zero())
            } else if !b.is_zero() {
                (spec.one(), spec.zero(), self.inverse(b).unwrap())
            } else {
                (spec.zero(), spec.zero(), spec.zero())
            });
        }
        let free = self.free_vars();
        match (spec.base(), free.len()) {
            (Base::Integers, 0) => {
                let (x, y) = (constant_of(a)?, constant_of(b)?);
                let (d, r, s) = int_ext_gcd(&x, &y);
                Ok((spec.integer(d), spec.integer(r), spec.integer(s)))
            }
            (Base::PrimeField(p), 1) => {
                if !a.is_polynomial() || !b.is_polynomial() {
                    return Err(RingError::UnsupportedQuotient("residues must be polynomials".into()));
                }
                let (d, r, s) = uni::ext_gcd_field(a.numer(), b.numer(), free[0], p);
                Ok((RingElem::from_poly(d), RingElem::from_poly(r), RingElem::from_poly(s)))
            }
            _ => Err(RingError::UnsupportedQuotient(format!(
                "{self} has no constructive gcd (not known to be Bezout)"
            ))),
        }
    }

    /// Exact quotient `a / d` in the residue ring.
    pub fn div_exact(&self, a: &RingElem, d: &RingElem) -> Option<RingElem> {
        if self.is_field() {
            return Some(self.canon(&(a * &self.inverse(d)?)));
        }
        if !a.is_polynomial() || !d.is_polynomial() {
            return None;
        }
        a.numer().div_exact(d.numer()).map(RingElem::from_poly)
    }

    /// A preimage in `R` of a residue value.
    pub fn lift(&self, a: &RingElem) -> RingElem {
        match self {
            QuotientRing::SubstituteZero { .. } => a.clone(),
            QuotientRing::ModPolynomial { .. } => self.canon(a),
            QuotientRing::ModInteger { p, source, .. } => {
                let a = if a.is_polynomial() {
                    a.clone()
                } else {
                    let inv = a.denom().as_constant().expect("constant denominator in F_p");
                    let inv = super::poly::mod_inverse(&inv, *p).unwrap();
                    RingElem::from_poly(a.numer().scale(&inv))
                };
                let raw: Vec<_> = a
                    .numer()
                    .terms()
                    .map(|(m, c)| (m.clone(), c.clone()))
                    .collect();
                RingElem::from_poly(Poly::from_terms(source.ring(), raw))
            }
        }
    }
}

impl fmt::Display for QuotientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientRing::SubstituteZero { spec, var } => {
                write!(f, "{}/({})", spec, spec.variables()[*var])
            }
            QuotientRing::ModInteger { p, source, .. } => write!(f, "{source}/({p})"),
            QuotientRing::ModPolynomial { spec, modulus, .. } => write!(f, "{spec}/({modulus})"),
        }
    }
}

fn constant_of(a: &RingElem) -> Result<BigInt, RingError> {
    a.as_integer()
        .ok_or_else(|| RingError::UnsupportedQuotient(format!("{a} is not an integer")))
}

/// Extended Euclid over ℤ with a nonnegative gcd.
pub(crate) fn int_ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}
