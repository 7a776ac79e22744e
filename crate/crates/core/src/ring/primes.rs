use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::poly::{pow_mod, uni, Poly};
use super::{Base, RingElem, RingError, RingSpec};

/// How primality of an element was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Verified,
    Asserted,
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Maximum number of trial divisors tried for irreducibility over 𝔽ₚ.
const TRIAL_DIVISOR_LIMIT: u64 = 1 << 20;

/// Primality of a polynomial element `p` of the un-localized ring of `spec`.
///
/// Decided classes: integer primes (up to 64 bits) in ℤ[x̄]; a variable (up
/// to a unit) in any polynomial ring; univariate polynomials over 𝔽ₚ by
/// trial division.  Obvious non-primes (zero, units, composite integers,
/// polynomials with nontrivial content or monomial factors) answer `false`.
/// Everything else is `Unsupported`.
pub fn is_prime_supported(p: &RingElem, spec: &RingSpec) -> Result<bool, RingError> {
    let p = p
        .embed(spec.ring())
        .ok_or_else(|| RingError::NotInRing(spec.to_string()))?;
    if !p.is_polynomial() {
        return Err(RingError::Unsupported(format!("{p} is not a polynomial")));
    }
    let poly = p.numer();
    if poly.is_zero() {
        return Ok(false);
    }
    let base = spec.base();
    if let Some(c) = poly.as_constant() {
        return match base {
            Base::PrimeField(_) => Ok(false),
            Base::Integers => match c.abs().to_u64() {
                Some(n) => Ok(is_prime_u64(n)),
                None => Err(RingError::Unsupported(format!(
                    "integer {c} exceeds the 64-bit primality test"
                ))),
            },
        };
    }
    if let Some((c, m)) = poly.as_term() {
        let unit = match base {
            Base::Integers => c.abs().is_one(),
            Base::PrimeField(_) => true,
        };
        let deg: u32 = m.iter().sum();
        return Ok(unit && deg == 1);
    }
    if base == Base::Integers && !poly.content().is_one() {
        return Ok(false);
    }
    if poly.monomial_content().iter().any(|&e| e > 0) {
        return Ok(false);
    }
    if let (Base::PrimeField(q), Some(Some(var))) = (base, poly.univariate_in()) {
        return irreducible_over_field(poly, var, q);
    }
    Err(RingError::Unsupported(format!(
        "primality of {p} in {spec} is outside the decidable classes"
    )))
}

fn irreducible_over_field(f: &Poly, var: usize, q: u64) -> Result<bool, RingError> {
    let deg = f.degree_in(var).unwrap_or(0);
    if deg <= 1 {
        return Ok(deg == 1);
    }
    let half = deg / 2;
    let count = (1..=half).try_fold(0u64, |acc, d| {
        q.checked_pow(d).and_then(|n| acc.checked_add(n))
    });
    match count {
        Some(n) if n <= TRIAL_DIVISOR_LIMIT => {}
        _ => {
            return Err(RingError::Unsupported(format!(
                "degree {deg} over F{q} is too large for trial factorization"
            )))
        }
    }
    let ring = f.ring().clone();
    for d in 1..=half {
        // All monic polynomials of degree d.
        let total = q.pow(d);
        for idx in 0..total {
            let mut cs: Vec<BigInt> = Vec::with_capacity(d as usize + 1);
            let mut k = idx;
            for _ in 0..d {
                cs.push(BigInt::from(k % q));
                k /= q;
            }
            cs.push(BigInt::one());
            let g = uni::from_coeffs(&ring, var, &cs);
            let (_, r) = uni::divrem_field(f, &g, var, q);
            if r.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
