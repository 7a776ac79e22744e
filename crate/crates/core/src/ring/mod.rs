//! Exact arithmetic in the fraction field of ℤ[x₁..xₙ] or 𝔽ₚ[x₁..xₙ] and of
//! their localizations at finitely many explicit elements.

mod elem;
mod ideal;
pub mod poly;
mod primes;
mod quotient;
mod valuation;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

pub use elem::RingElem;
pub use ideal::{divides, gcd_base, lprincipal_transfer, pair_principal_in_quotient, Bezout, PairVerdict, Transfer};
pub use poly::Poly;
pub use primes::{is_prime_supported, is_prime_u64, Primality};
pub use quotient::{QuotientRing, Residue};
pub use valuation::{Val, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("element is not integral at the prime (negative valuation)")]
    NotIntegral,
    #[error("unsupported ring for this operation: {0}")]
    UnsupportedRing(String),
    #[error("unsupported quotient: {0}")]
    UnsupportedQuotient(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("{0} is not prime in the ring")]
    NotPrime(String),
    #[error("element does not belong to ring {0}")]
    NotInRing(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Base {
    Integers,
    /// 𝔽ₚ for a prime `p`.
    PrimeField(u64),
}

impl Base {
    pub(crate) fn reduce(&self, c: BigInt) -> BigInt {
        match self {
            Base::Integers => c,
            Base::PrimeField(p) => c.mod_floor(&BigInt::from(*p)),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Base::Integers => 0,
            Base::PrimeField(p) => *p,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Integers => write!(f, "Z"),
            Base::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// A polynomial ring `base[vars]`; shared by every polynomial living in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing {
    pub base: Base,
    pub vars: Vec<String>,
}

impl PolyRing {
    pub fn new(base: Base, vars: Vec<String>) -> Arc<PolyRing> {
        Arc::new(PolyRing { base, vars })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

impl fmt::Display for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        if !self.vars.is_empty() {
            write!(f, "[{}]", self.vars.join(","))?;
        }
        Ok(())
    }
}

/// A supported ring: `base[vars]` localized at the listed elements.
#[derive(Debug, Clone)]
pub struct RingSpec {
    ring: Arc<PolyRing>,
    inverted: Vec<RingElem>,
}

impl RingSpec {
    pub fn new(base: Base, vars: Vec<String>, inverted: Vec<RingElem>) -> Result<RingSpec, RingError> {
        if let Base::PrimeField(q) = base {
            if !is_prime_u64(q) {
                return Err(RingError::Unsupported(format!(
                    "base field F{q}: only prime fields are supported"
                )));
            }
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(RingError::Unsupported(format!("duplicate variable {v}")));
            }
        }
        let ring = PolyRing::new(base, vars);
        let spec = RingSpec { ring, inverted: Vec::new() };
        spec.localize(inverted)
    }

    pub fn polynomial(base: Base, vars: &[&str]) -> Result<RingSpec, RingError> {
        RingSpec::new(base, vars.iter().map(|s| s.to_string()).collect(), Vec::new())
    }

    /// Invert additional elements; each must be a nonzero polynomial.
    pub fn localize(&self, extra: Vec<RingElem>) -> Result<RingSpec, RingError> {
        let mut inverted = self.inverted.clone();
        for e in extra {
            let e = e.embed(&self.ring).ok_or_else(|| RingError::NotInRing(self.to_string()))?;
            if e.is_zero() {
                return Err(RingError::ZeroDenominator);
            }
            if !e.is_polynomial() {
                return Err(RingError::Unsupported(format!(
                    "inverted element {e} must be a polynomial"
                )));
            }
            if !inverted.contains(&e) {
                inverted.push(e);
            }
        }
        Ok(RingSpec { ring: self.ring.clone(), inverted })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn base(&self) -> Base {
        self.ring.base
    }

    pub fn variables(&self) -> &[String] {
        &self.ring.vars
    }

    pub fn inverted(&self) -> &[RingElem] {
        &self.inverted
    }

    /// The un-localized polynomial ring.
    pub fn polynomial_ring(&self) -> RingSpec {
        RingSpec { ring: self.ring.clone(), inverted: Vec::new() }
    }

    pub fn is_localized(&self) -> bool {
        !self.inverted.is_empty()
    }

    /// A new spec with extra variables appended (for building R₀[s,t] from R₀).
    pub fn with_extra_vars(&self, extra: &[&str]) -> Result<RingSpec, RingError> {
        let mut vars = self.ring.vars.clone();
        for v in extra {
            if vars.iter().any(|x| x == v) {
                return Err(RingError::Unsupported(format!("variable {v} already present")));
            }
            vars.push(v.to_string());
        }
        let spec = RingSpec::new(self.ring.base, vars, Vec::new())?;
        let inv = self.inverted.clone();
        spec.localize(inv)
    }

    pub fn zero(&self) -> RingElem {
        RingElem::from_poly(Poly::zero(&self.ring))
    }

    pub fn one(&self) -> RingElem {
        RingElem::from_poly(Poly::one(&self.ring))
    }

    pub fn int(&self, c: i64) -> RingElem {
        RingElem::from_poly(Poly::constant(&self.ring, BigInt::from(c)))
    }

    pub fn integer(&self, c: BigInt) -> RingElem {
        RingElem::from_poly(Poly::constant(&self.ring, c))
    }

    /// The variable named `name`.  Panics if absent.
    pub fn var(&self, name: &str) -> RingElem {
        let i = self
            .ring
            .var_index(name)
            .unwrap_or_else(|| panic!("no variable {name} in {self}"));
        RingElem::from_poly(Poly::var(&self.ring, i))
    }

    pub fn var_at(&self, index: usize) -> RingElem {
        RingElem::from_poly(Poly::var(&self.ring, index))
    }

    /// Membership of `e` in this (possibly localized) ring.
    ///
    /// `e = n/d` lies in `R[1/d₁,…,1/dₖ]` iff `d` divides `(d₁⋯dₖ)^m · n` for
    /// some `m`; `m` is bounded by the size of `d`.
    pub fn contains(&self, e: &RingElem) -> bool {
        if e.is_polynomial() {
            return true;
        }
        if self.inverted.is_empty() {
            return false;
        }
        let prod = self
            .inverted
            .iter()
            .fold(Poly::one(&self.ring), |acc, x| acc.mul(x.numer()));
        let bound = localization_exponent_bound(e.denom());
        let mut acc = e.numer().clone();
        for _ in 0..=bound {
            if e.denom().divides(&acc) {
                return true;
            }
            acc = acc.mul(&prod);
        }
        false
    }
}

/// Upper bound on the power of the inverted product needed to clear `d`.
fn localization_exponent_bound(d: &Poly) -> u32 {
    let deg = d.total_degree().unwrap_or(0);
    let bits = match d.base() {
        Base::Integers => d.content().bits() as u32,
        Base::PrimeField(_) => 0,
    };
    deg + bits + 1
}

impl PartialEq for RingSpec {
    fn eq(&self, other: &RingSpec) -> bool {
        *self.ring == *other.ring
            && self.inverted.len() == other.inverted.len()
            && self.inverted.iter().all(|x| other.inverted.iter().any(|y| x == y))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ring)?;
        if !self.inverted.is_empty() {
            let parts: Vec<String> = self.inverted.iter().map(|e| e.to_string()).collect();
            write!(f, " loc({})", parts.join(","))?;
        }
        Ok(())
    }
}
