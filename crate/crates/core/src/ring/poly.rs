//! Sparse multivariate polynomials over ℤ or a prime field.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so iteration
//! order is lexicographic with the first ring variable most significant; the
//! leading term is the last entry.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Base, PolyRing};

pub type Monomial = Vec<u32>;

#[derive(Clone)]
pub struct Poly {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero(ring: &Arc<PolyRing>) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Poly {
        Poly::constant(ring, BigInt::one())
    }

    pub fn constant(ring: &Arc<PolyRing>, c: BigInt) -> Poly {
        Poly::term(ring, c, vec![0; ring.nvars()])
    }

    pub fn var(ring: &Arc<PolyRing>, index: usize) -> Poly {
        let mut exps = vec![0; ring.nvars()];
        exps[index] = 1;
        Poly::term(ring, BigInt::one(), exps)
    }

    pub fn term(ring: &Arc<PolyRing>, c: BigInt, exps: Monomial) -> Poly {
        assert_eq!(exps.len(), ring.nvars(), "monomial arity mismatch");
        let c = ring.base.reduce(c);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub(crate) fn from_terms(ring: &Arc<PolyRing>, raw: impl IntoIterator<Item = (Monomial, BigInt)>) -> Poly {
        let mut terms: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in raw {
            debug_assert_eq!(m.len(), ring.nvars());
            *terms.entry(m).or_insert_with(BigInt::zero) += c;
        }
        let base = ring.base;
        terms = terms
            .into_iter()
            .map(|(m, c)| (m, base.reduce(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn base(&self) -> Base {
        self.ring.base
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The coefficient if this is a constant polynomial (zero included).
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// `Some((c, exps))` when the polynomial is a single nonzero term.
    pub fn as_term(&self) -> Option<(&BigInt, &Monomial)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((c, m))
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    pub fn coeff(&self, m: &[u32]) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m[var]).max()
    }

    /// Smallest exponent of `var` across all terms; `None` for zero.
    pub fn min_degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m[var]).min()
    }

    /// Indices of the variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ring.nvars())
            .filter(|&i| self.terms.keys().any(|m| m[i] > 0))
            .collect()
    }

    fn check_ring(&self, other: &Poly) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring,
            "polynomials from different rings: {} vs {}",
            self.ring,
            other.ring
        );
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_ring(other);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(m.clone()).or_insert_with(BigInt::zero);
            *e += c;
            *e = self.ring.base.reduce(std::mem::take(e));
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Poly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> Poly {
        let base = self.ring.base;
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), base.reduce(-c)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_ring(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.ring);
        }
        let mut terms: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                *terms.entry(m).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        Poly::from_terms(&self.ring, terms)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        let base = self.ring.base;
        Poly::from_terms(
            &self.ring,
            self.terms.iter().map(|(m, k)| (m.clone(), base.reduce(k * c))),
        )
    }

    /// Multiply by the monomial with exponent vector `shift`.
    pub fn shift(&self, shift: &[u32]) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Divide by the monomial `shift`; caller guarantees divisibility.
    pub fn unshift(&self, shift: &[u32]) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.iter().zip(shift).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        let mut sq = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// Exact quotient `self / d` if `d` divides `self` in the polynomial ring.
    ///
    /// Leading-term division in lex order; a failure to divide a leading term
    /// proves non-divisibility because the ring is a domain.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        self.check_ring(d);
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(&self.ring));
        }
        if d.is_one() {
            return Some(self.clone());
        }
        let base = self.ring.base;
        let (dm, dc) = d.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let dc_inv = match base {
            Base::PrimeField(p) => Some(mod_inverse(&dc, p)?),
            Base::Integers => None,
        };
        let mut rem = self.clone();
        let mut quot: Vec<(Monomial, BigInt)> = Vec::new();
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if rm.iter().zip(&dm).any(|(a, b)| a < b) {
                return None;
            }
            let qc = match &dc_inv {
                Some(inv) => base.reduce(&rc * inv),
                None => {
                    let (q, r) = rc.div_rem(&dc);
                    if !r.is_zero() {
                        return None;
                    }
                    q
                }
            };
            let qm: Monomial = rm.iter().zip(&dm).map(|(a, b)| a - b).collect();
            let t = Poly::term(&self.ring, qc.clone(), qm.clone());
            rem = rem.sub(&t.mul(d));
            quot.push((qm, qc));
        }
        Some(Poly::from_terms(&self.ring, quot))
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_exact(self).is_some()
    }

    /// Positive gcd of the integer coefficients (ℤ), or 1 for a nonzero
    /// polynomial over a field.
    pub fn content(&self) -> BigInt {
        match self.ring.base {
            Base::Integers => self
                .terms
                .values()
                .fold(BigInt::zero(), |g, c| g.gcd(c)),
            Base::PrimeField(_) => {
                if self.is_zero() {
                    BigInt::zero()
                } else {
                    BigInt::one()
                }
            }
        }
    }

    /// Exact division of every coefficient by `c` (ℤ) or multiplication by
    /// its inverse (prime field).
    pub fn div_scalar(&self, c: &BigInt) -> Poly {
        match self.ring.base {
            Base::Integers => Poly {
                ring: self.ring.clone(),
                terms: self.terms.iter().map(|(m, k)| (m.clone(), k / c)).collect(),
            },
            Base::PrimeField(p) => {
                let inv = mod_inverse(c, p).expect("division by zero scalar");
                self.scale(&inv)
            }
        }
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let n = self.ring.nvars();
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; n];
        };
        let mut acc = first.clone();
        for m in it {
            for (a, b) in acc.iter_mut().zip(m) {
                *a = (*a).min(*b);
            }
        }
        acc
    }

    /// Substitute `var = value` where `value` is a polynomial of the same ring.
    pub fn substitute(&self, var: usize, value: &Poly) -> Poly {
        let mut out = Poly::zero(&self.ring);
        let mut cache: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m[var];
            let pw = cache.entry(e).or_insert_with(|| value.pow(e)).clone();
            let mut rest = m.clone();
            rest[var] = 0;
            out = out.add(&Poly::term(&self.ring, c.clone(), rest).mul(&pw));
        }
        out
    }

    pub fn substitute_zero(&self, var: usize) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m[var] == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Move into another ring, mapping variables by name.
    ///
    /// Returns `None` when a variable of `self` that occurs is absent from
    /// `target`, or when coefficients cannot be carried over (ℤ → 𝔽ₚ reduces,
    /// 𝔽ₚ → ℤ is refused).
    pub fn embed(&self, target: &Arc<PolyRing>) -> Option<Poly> {
        if Arc::ptr_eq(&self.ring, target) || *self.ring == **target {
            return Some(Poly {
                ring: target.clone(),
                terms: self.terms.clone(),
            });
        }
        match (self.ring.base, target.base) {
            (Base::Integers, _) => {}
            (Base::PrimeField(p), Base::PrimeField(q)) if p == q => {}
            _ => return None,
        }
        let mut map = Vec::with_capacity(self.ring.nvars());
        for (i, name) in self.ring.vars.iter().enumerate() {
            match target.var_index(name) {
                Some(j) => map.push(Some(j)),
                None if self.terms.keys().all(|m| m[i] == 0) => map.push(None),
                None => return None,
            }
        }
        let n = target.nvars();
        Some(Poly::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; n];
                for (i, j) in map.iter().enumerate() {
                    if let Some(j) = j {
                        e[*j] = m[i];
                    }
                }
                (e, c.clone())
            }),
        ))
    }

    /// Evaluate modulo `modulus` at the given point (one residue per variable).
    pub fn eval_mod(&self, point: &[u64], modulus: u64) -> u64 {
        let m = modulus as u128;
        let mut acc: u128 = 0;
        for (mono, c) in &self.terms {
            let mut v = c.mod_floor(&BigInt::from(modulus)).to_u64().unwrap() as u128;
            for (e, x) in mono.iter().zip(point) {
                v = v * pow_mod(*x, *e as u64, modulus) as u128 % m;
            }
            acc = (acc + v) % m;
        }
        acc as u64
    }

    /// Reduce coefficients modulo the prime `p`, landing in `target` (which
    /// must have the same variables over 𝔽ₚ).
    pub fn reduce_coefficients(&self, target: &Arc<PolyRing>) -> Poly {
        Poly::from_terms(target, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    /// `Some(var)` if at most one variable occurs (`Some(None)` for constants).
    pub fn univariate_in(&self) -> Option<Option<usize>> {
        let s = self.support();
        match s.len() {
            0 => Some(None),
            1 => Some(Some(s[0])),
            _ => None,
        }
    }

    pub fn fmt_with_parens(&self) -> String {
        let s = self.to_string();
        if self.terms.len() > 1 {
            format!("({s})")
        } else {
            s
        }
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Poly) -> bool {
        self.terms == other.terms && *self.ring == *other.ring
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = m.iter().all(|&e| e == 0);
            if !abs.is_one() || is_const {
                factors.push(abs.to_string());
            }
            for (v, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ring.vars[v].clone()),
                    _ => factors.push(format!("{}^{}", self.ring.vars[v], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

pub(crate) fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut x = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * x % m128;
        }
        x = x * x % m128;
        e >>= 1;
    }
    acc as u64
}

/// Inverse of `c` modulo the prime `p`, `None` when `c ≡ 0`.
pub(crate) fn mod_inverse(c: &BigInt, p: u64) -> Option<BigInt> {
    let pb = BigInt::from(p);
    let c = c.mod_floor(&pb);
    if c.is_zero() {
        return None;
    }
    let e = c.extended_gcd(&pb);
    Some(e.x.mod_floor(&pb))
}

/// Univariate algorithms in a designated variable.  The polynomials may live
/// in a ring with several variables as long as only `var` occurs.
pub(crate) mod uni {
    use super::*;

    /// Dense coefficients, lowest degree first.
    pub fn coeffs(p: &Poly, var: usize) -> Vec<BigInt> {
        let deg = p.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![BigInt::zero(); deg + 1];
        for (m, c) in p.terms() {
            out[m[var] as usize] += c;
        }
        while out.len() > 1 && out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        if p.is_zero() {
            out.clear();
        }
        out
    }

    pub fn from_coeffs(ring: &Arc<PolyRing>, var: usize, cs: &[BigInt]) -> Poly {
        let n = ring.nvars();
        Poly::from_terms(
            ring,
            cs.iter().enumerate().map(|(i, c)| {
                let mut m = vec![0; n];
                m[var] = i as u32;
                (m, c.clone())
            }),
        )
    }

    pub fn degree(p: &Poly, var: usize) -> Option<u32> {
        p.degree_in(var)
    }

    /// Division with remainder over a prime field.
    pub fn divrem_field(a: &Poly, b: &Poly, var: usize, p: u64) -> (Poly, Poly) {
        let ring = a.ring().clone();
        let bc = coeffs(b, var);
        let db = bc.len() - 1;
        let inv = mod_inverse(&bc[db], p).expect("divisor must be nonzero");
        let pb = BigInt::from(p);
        let mut r = coeffs(a, var);
        if r.len() < bc.len() {
            return (Poly::zero(&ring), a.clone());
        }
        let mut q = vec![BigInt::zero(); r.len() - db];
        for i in (0..q.len()).rev() {
            let c = (&r[i + db] * &inv).mod_floor(&pb);
            if !c.is_zero() {
                for (j, bj) in bc.iter().enumerate() {
                    r[i + j] = (&r[i + j] - &c * bj).mod_floor(&pb);
                }
            }
            q[i] = c;
        }
        r.truncate(db);
        (from_coeffs(&ring, var, &q), from_coeffs(&ring, var, &r))
    }

    /// Monic gcd with Bezout cofactors over 𝔽ₚ: `(d, s, t)` with `s a + t b = d`.
    pub fn ext_gcd_field(a: &Poly, b: &Poly, var: usize, p: u64) -> (Poly, Poly, Poly) {
        let ring = a.ring().clone();
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(&ring), Poly::zero(&ring));
        let (mut t0, mut t1) = (Poly::zero(&ring), Poly::one(&ring));
        while !r1.is_zero() {
            let (q, r) = divrem_field(&r0, &r1, var, p);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let lc = r0.leading_coeff();
        (r0.div_scalar(&lc), s0.div_scalar(&lc), t0.div_scalar(&lc))
    }

    /// Pseudo-remainder of `a` by `b` over ℤ.
    fn prem(a: &Poly, b: &Poly, var: usize) -> Poly {
        let ring = a.ring().clone();
        let bc = coeffs(b, var);
        let db = bc.len() - 1;
        let lb = bc[db].clone();
        let mut r = coeffs(a, var);
        while !r.is_empty() && r.len() >= bc.len() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (j, bj) in bc.iter().enumerate() {
                r[dr - db + j] -= &lr * bj;
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        from_coeffs(&ring, var, &r)
    }

    fn primitive(p: &Poly) -> Poly {
        let c = p.content();
        if c.is_zero() || c.is_one() {
            p.clone()
        } else {
            p.div_scalar(&c)
        }
    }

    /// Gcd in ℤ[var] with positive leading coefficient.
    pub fn gcd_integers(a: &Poly, b: &Poly, var: usize) -> Poly {
        if a.is_zero() {
            return normalize_sign(b);
        }
        if b.is_zero() {
            return normalize_sign(a);
        }
        let c = a.content().gcd(&b.content());
        let (mut x, mut y) = (primitive(a), primitive(b));
        if degree(&x, var) < degree(&y, var) {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_zero() {
            let r = prem(&x, &y, var);
            x = y;
            y = if r.is_zero() { r } else { primitive(&r) };
        }
        normalize_sign(&x.scale(&c))
    }

    fn normalize_sign(p: &Poly) -> Poly {
        if p.leading_coeff().is_negative() {
            p.neg()
        } else {
            p.clone()
        }
    }
}
