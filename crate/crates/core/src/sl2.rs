//! 2×2 matrices over the fraction field, elementary words and the finite
//! generating set of `E₂` over a Laurent polynomial ring.

use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use thiserror::Error;

use crate::ring::{PolyRing, RingElem, RingError, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sl2Error {
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("parameter must be nonzero")]
    ZeroElement,
    #[error("ring does not invert every generator: {0}")]
    NotFullyLocalized(String),
    #[error("unknown generator index {0}")]
    UnknownGenerator(usize),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElemKind {
    E12,
    E21,
}

/// `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2 {
    pub a11: RingElem,
    pub a12: RingElem,
    pub a21: RingElem,
    pub a22: RingElem,
}

impl Mat2 {
    pub fn new(a11: RingElem, a12: RingElem, a21: RingElem, a22: RingElem) -> Mat2 {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn identity(spec: &RingSpec) -> Mat2 {
        Mat2::new(spec.one(), spec.zero(), spec.zero(), spec.one())
    }

    fn identity_like(e: &RingElem) -> Mat2 {
        Mat2::new(e.one_like(), e.zero_like(), e.zero_like(), e.one_like())
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.a11.ring()
    }

    pub fn elem(kind: ElemKind, r: RingElem) -> Mat2 {
        let (one, zero) = (r.one_like(), r.zero_like());
        match kind {
            ElemKind::E12 => Mat2::new(one.clone(), r, zero, one),
            ElemKind::E21 => Mat2::new(one.clone(), zero, r, one),
        }
    }

    pub fn e12(r: RingElem) -> Mat2 {
        Mat2::elem(ElemKind::E12, r)
    }

    pub fn e21(r: RingElem) -> Mat2 {
        Mat2::elem(ElemKind::E21, r)
    }

    /// `D(α, β)`; only `αβ ≠ 0` is required.
    pub fn diag(alpha: RingElem, beta: RingElem) -> Result<Mat2, Sl2Error> {
        if alpha.is_zero() || beta.is_zero() {
            return Err(Sl2Error::ZeroElement);
        }
        let zero = alpha.zero_like();
        Ok(Mat2::new(alpha, zero.clone(), zero, beta))
    }

    /// `w = [[0, 1], [-1, 0]]`.
    pub fn weyl(spec: &RingSpec) -> Mat2 {
        Mat2::new(spec.zero(), spec.one(), -spec.one(), spec.zero())
    }

    pub fn entries(&self) -> [&RingElem; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    pub fn map(&self, f: impl Fn(&RingElem) -> RingElem) -> Mat2 {
        Mat2::new(f(&self.a11), f(&self.a12), f(&self.a21), f(&self.a22))
    }

    pub fn det(&self) -> RingElem {
        &self.a11 * &self.a22 - &self.a12 * &self.a21
    }

    pub fn is_sl2(&self) -> bool {
        self.det().is_one()
    }

    /// Entries in `spec` and determinant one.
    pub fn in_sl2_of(&self, spec: &RingSpec) -> bool {
        self.is_sl2() && self.entries().iter().all(|e| spec.contains(e))
    }

    pub fn is_identity(&self) -> bool {
        self.a11.is_one() && self.a22.is_one() && self.a12.is_zero() && self.a21.is_zero()
    }

    pub fn adjugate(&self) -> Mat2 {
        Mat2::new(self.a22.clone(), -&self.a12, -&self.a21, self.a11.clone())
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self) -> Result<Mat2, Sl2Error> {
        let d = self.det();
        if !d.is_one() {
            return Err(Sl2Error::NotUnimodular(d.to_string()));
        }
        Ok(self.adjugate())
    }

    /// Inverse of any invertible matrix.
    pub fn inv_general(&self) -> Result<Mat2, Sl2Error> {
        let d = self.det();
        if d.is_zero() {
            return Err(Sl2Error::NotUnimodular(d.to_string()));
        }
        let di = d.inv().unwrap();
        Ok(self.adjugate().map(|e| e * &di))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a11 * &o.a11 + &self.a12 * &o.a21,
            &self.a11 * &o.a12 + &self.a12 * &o.a22,
            &self.a21 * &o.a11 + &self.a22 * &o.a21,
            &self.a21 * &o.a12 + &self.a22 * &o.a22,
        )
    }

    /// `self^n`; negative powers need an invertible matrix.
    pub fn pow(&self, n: i64) -> Result<Mat2, Sl2Error> {
        let base = if n < 0 { self.inv_general()? } else { self.clone() };
        let mut acc = Mat2::identity_like(&self.a11);
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// `c · self · c⁻¹`.
    pub fn conj(&self, c: &Mat2) -> Result<Mat2, Sl2Error> {
        Ok(c.mul(self).mul(&c.inv_general()?))
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        Mat2::mul(self, rhs)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

/// Word letter; parameters are kept symbolically.
#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    E12(RingElem),
    E21(RingElem),
    Diag(RingElem, RingElem),
    Named(usize),
}

impl Token {
    pub fn eval(&self, table: &[Mat2]) -> Result<Mat2, Sl2Error> {
        match self {
            Token::E12(r) => Ok(Mat2::e12(r.clone())),
            Token::E21(r) => Ok(Mat2::e21(r.clone())),
            Token::Diag(a, b) => Mat2::diag(a.clone(), b.clone()),
            Token::Named(i) => table.get(*i).cloned().ok_or(Sl2Error::UnknownGenerator(*i)),
        }
    }

    /// Inverse letter; named generators have none.
    pub fn inverse(&self) -> Option<Token> {
        match self {
            Token::E12(r) => Some(Token::E12(-r)),
            Token::E21(r) => Some(Token::E21(-r)),
            Token::Diag(a, b) => Some(Token::Diag(a.inv()?, b.inv()?)),
            Token::Named(_) => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::E12(r) => write!(f, "E12({r})"),
            Token::E21(r) => write!(f, "E21({r})"),
            Token::Diag(a, b) => write!(f, "D({a},{b})"),
            Token::Named(i) => write!(f, "g{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GenWord {
    pub tokens: Vec<Token>,
}

impl GenWord {
    pub fn new(tokens: Vec<Token>) -> GenWord {
        GenWord { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn concat(&self, other: &GenWord) -> GenWord {
        let mut tokens = self.tokens.clone();
        tokens.extend(other.tokens.iter().cloned());
        GenWord { tokens }
    }

    pub fn inverse(&self) -> Option<GenWord> {
        let tokens = self.tokens.iter().rev().map(Token::inverse).collect::<Option<Vec<_>>>()?;
        Some(GenWord { tokens })
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tokens.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self.tokens.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Left-to-right product of the word; `table` resolves named generators.
pub fn word_eval(w: &GenWord, table: &[Mat2], spec: &RingSpec) -> Result<Mat2, Sl2Error> {
    w.tokens
        .iter()
        .try_fold(Mat2::identity(spec), |acc, t| Ok(acc.mul(&t.eval(table)?)))
}

/// `E₁₂(1/r)E₂₁(−r)E₁₂(1/r) · E₁₂(−1)E₂₁(1)E₁₂(−1) = D(1/r, r)`.
pub fn whirl_identity(r: &RingElem) -> Result<GenWord, Sl2Error> {
    let ri = r.inv().ok_or(Sl2Error::ZeroElement)?;
    let one = r.one_like();
    Ok(GenWord::new(vec![
        Token::E12(ri.clone()),
        Token::E21(-r),
        Token::E12(ri),
        Token::E12(-&one),
        Token::E21(one.clone()),
        Token::E12(-&one),
    ]))
}

/// Generators of `E₂(P[y₁^±1,…,y_m^±1])`: `D(yᵢ, 1/yᵢ)` and `E₁₂(z), E₂₁(z)`
/// for every square-free monomial `z` in the `yᵢ` (including `z = 1`).
pub fn e2_generating_set(spec: &RingSpec) -> Result<Vec<Mat2>, Sl2Error> {
    let m = spec.variables().len();
    let ys: Vec<RingElem> = (0..m).map(|i| spec.var_at(i)).collect();
    for y in &ys {
        if !spec.contains(&(spec.one() / y)) {
            return Err(Sl2Error::NotFullyLocalized(format!("{y} is not a unit in {spec}")));
        }
    }
    let mut gens: Vec<Mat2> = ys
        .iter()
        .map(|y| Mat2::diag(y.clone(), spec.one() / y))
        .collect::<Result<_, _>>()?;
    for mask in 0u64..(1 << m) {
        let z = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .fold(spec.one(), |acc, i| acc * &ys[i]);
        gens.push(Mat2::e12(z.clone()));
        gens.push(Mat2::e21(z));
    }
    Ok(gens)
}
