//! Bounded exhaustive search for factorizations into elementary matrices
//! (or into a finite generator menu).
//!
//! Parametric menus hold `E₁₂(m)`, `E₂₁(m)` for `m = c·μ·∏dⱼ^{−kⱼ}` with
//! `|c| ≤ H`, `μ` a Laurent monomial (negative exponents only on inverted
//! variables), `dⱼ` the other inverted elements and total degree
//! `Σ|μ| + Σkⱼ ≤ D`.  Words are alternating (reduced) products of such
//! tokens; prefixes are enumerated and the last three tokens are solved for.
//!
//! Layer work is filtered on fingerprints (evaluation mod a prime at
//! points where every relevant denominator is nonzero).  Equal values have
//! equal fingerprints, so filtering never loses a solution; candidates are
//! confirmed in exact arithmetic.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::ring::{Base, RingElem, RingSpec};
use crate::sl2::{word_eval, ElemKind, GenWord, Mat2, Token};

/// Default ceiling on fingerprint-level work units per search.
pub const DEFAULT_CEILING: u128 = 2_000_000_000;
/// Maximum stored layer size for finite menus.
pub const LAYER_CAP: u128 = 100_000;
/// Exact-arithmetic work is charged this many units per step.
const EXACT_COST: u128 = 2_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("estimated work {estimate} exceeds the ceiling {ceiling} (set SL2_SEARCH_CEILING to raise it)")]
    BudgetTooLarge { estimate: u128, ceiling: u128 },
    #[error("target is not in SL2 of the ring")]
    NotInSl2,
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Menu {
    /// Elementary tokens with capped monomial parameters.
    Parametric,
    /// A fixed list of matrices (inverses are added automatically).
    Finite(Vec<Mat2>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchBudget {
    pub max_depth: usize,
    pub coeff_height_cap: u64,
    pub degree_cap: u32,
    pub menu: Menu,
    /// Work ceiling; `None` reads `SL2_SEARCH_CEILING` or uses the default.
    pub ceiling: Option<u128>,
}

impl SearchBudget {
    pub fn parametric(max_depth: usize, coeff_height_cap: u64, degree_cap: u32) -> SearchBudget {
        SearchBudget { max_depth, coeff_height_cap, degree_cap, menu: Menu::Parametric, ceiling: None }
    }

    pub fn finite(max_depth: usize, menu: Vec<Mat2>) -> SearchBudget {
        SearchBudget { max_depth, coeff_height_cap: 1, degree_cap: 1, menu: Menu::Finite(menu), ceiling: None }
    }

    fn ceiling(&self) -> u128 {
        self.ceiling
            .or_else(|| std::env::var("SL2_SEARCH_CEILING").ok()?.parse().ok())
            .unwrap_or(DEFAULT_CEILING)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchStats {
    /// Largest depth fully searched (or the depth of the hit).
    pub depth: usize,
    /// Words covered, counted over the bound's word space.
    pub words_enumerated: u128,
    pub prefixes_evaluated: u128,
    pub dedup_hits: u64,
    pub menu_size: usize,
    pub fingerprinted: bool,
    pub engine: &'static str,
    pub found: bool,
}

impl SearchStats {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "depth": self.depth,
            "words_enumerated": self.words_enumerated.to_string(),
            "prefixes_evaluated": self.prefixes_evaluated.to_string(),
            "dedup_hits": self.dedup_hits,
            "menu_size": self.menu_size,
            "fingerprinted": self.fingerprinted,
            "engine": self.engine,
            "word_semantics": match self.engine {
                "parametric" => "reduced alternating words of menu tokens",
                _ => "words of menu matrices and their inverses",
            },
            "verdict": if self.found { "Found" } else { "NotFoundAtBound" },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchVerdict {
    Found(GenWord),
    NotFoundAtBound,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub verdict: SearchVerdict,
    pub stats: SearchStats,
    /// Resolves `Token::Named` indices in a found word.
    pub table: Vec<Mat2>,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&GenWord> {
        match &self.verdict {
            SearchVerdict::Found(w) => Some(w),
            SearchVerdict::NotFoundAtBound => None,
        }
    }
}

// ---------------------------------------------------------------------------
// fingerprints

const P61: u64 = (1 << 61) - 1;
const LANES: usize = 4;

type F = [u64; LANES];

#[derive(Debug, Clone)]
struct Fingerprinter {
    m: u64,
    points: Vec<Vec<u64>>,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

impl Fingerprinter {
    /// Points where every element of `guard` has a nonzero denominator (and
    /// every inverted element is nonzero).
    fn new(spec: &RingSpec, guard: &[&RingElem], seed: u64) -> Option<Fingerprinter> {
        let m = match spec.base() {
            Base::Integers => P61,
            Base::PrimeField(p) => p,
        };
        if m < 3 {
            return None;
        }
        let n = spec.variables().len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(LANES);
        let mut tries = 0;
        while points.len() < LANES {
            tries += 1;
            if tries > 400 {
                return None;
            }
            let pt: Vec<u64> = (0..n).map(|_| rng.gen_range(1..m)).collect();
            let ok_inv = spec
                .inverted()
                .iter()
                .all(|d| d.numer().eval_mod(&pt, m) != 0);
            let ok_guard = guard.iter().all(|e| e.denom().eval_mod(&pt, m) != 0);
            if ok_inv && ok_guard {
                points.push(pt);
            }
        }
        Some(Fingerprinter { m, points })
    }

    fn elem(&self, e: &RingElem) -> Option<F> {
        let mut out = [0; LANES];
        for (o, pt) in out.iter_mut().zip(&self.points) {
            *o = e.eval_mod(pt, self.m)?;
        }
        Some(out)
    }

    fn add(&self, a: F, b: F) -> F {
        std::array::from_fn(|i| (a[i] + b[i]) % self.m)
    }

    fn sub(&self, a: F, b: F) -> F {
        std::array::from_fn(|i| (a[i] + self.m - b[i]) % self.m)
    }

    fn mul(&self, a: F, b: F) -> F {
        std::array::from_fn(|i| mulmod(a[i], b[i], self.m))
    }

    fn neg(&self, a: F) -> F {
        std::array::from_fn(|i| (self.m - a[i]) % self.m)
    }

    fn inv(&self, a: F) -> Option<F> {
        if a.contains(&0) {
            return None;
        }
        Some(std::array::from_fn(|i| powmod(a[i], self.m - 2, self.m)))
    }

    fn one(&self) -> F {
        [1; LANES]
    }

    fn zero(&self) -> F {
        [0; LANES]
    }

    fn mat(&self, m: &Mat2) -> Option<FMat> {
        Some([self.elem(&m.a11)?, self.elem(&m.a12)?, self.elem(&m.a21)?, self.elem(&m.a22)?])
    }

    fn mat_mul(&self, a: &FMat, b: &FMat) -> FMat {
        [
            self.add(self.mul(a[0], b[0]), self.mul(a[1], b[2])),
            self.add(self.mul(a[0], b[1]), self.mul(a[1], b[3])),
            self.add(self.mul(a[2], b[0]), self.mul(a[3], b[2])),
            self.add(self.mul(a[2], b[1]), self.mul(a[3], b[3])),
        ]
    }

    fn mat_identity(&self) -> FMat {
        [self.one(), self.zero(), self.zero(), self.one()]
    }

    /// `E(kind, r) · m` as a row operation.
    fn left_elem(&self, kind: ElemKind, r: F, m: &FMat) -> FMat {
        match kind {
            ElemKind::E12 => [
                self.add(m[0], self.mul(r, m[2])),
                self.add(m[1], self.mul(r, m[3])),
                m[2],
                m[3],
            ],
            ElemKind::E21 => [
                m[0],
                m[1],
                self.add(m[2], self.mul(r, m[0])),
                self.add(m[3], self.mul(r, m[1])),
            ],
        }
    }
}

type FMat = [F; 4];

// ---------------------------------------------------------------------------
// parametric menu

/// The capped parameter set of a parametric menu.
#[derive(Debug, Clone)]
pub struct ParamMenu {
    pub params: Vec<RingElem>,
    inverted_vars: Vec<bool>,
    den_combos: Vec<(RingElem, u32)>,
    height: u64,
    degree: u32,
    base: Base,
}

fn other_kind(k: ElemKind) -> ElemKind {
    match k {
        ElemKind::E12 => ElemKind::E21,
        ElemKind::E21 => ElemKind::E12,
    }
}

fn exponent_vectors(n: usize, budget: u32, allow_neg: &[bool]) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let lo = if allow_neg[0] { -(budget as i64) } else { 0 };
    for e in lo..=budget as i64 {
        let rest = budget - e.unsigned_abs() as u32;
        for mut tail in exponent_vectors(n - 1, rest, &allow_neg[1..]) {
            tail.insert(0, e);
            out.push(tail);
        }
    }
    out
}

fn monomial(spec: &RingSpec, exps: &[i64]) -> RingElem {
    exps.iter()
        .enumerate()
        .fold(spec.one(), |acc, (i, &e)| acc * spec.var_at(i).pow(e))
}

impl ParamMenu {
    pub fn new(spec: &RingSpec, height: u64, degree: u32) -> Result<ParamMenu, SearchError> {
        if height == 0 {
            return Err(SearchError::InvalidBudget("coefficient height cap must be positive".into()));
        }
        let n = spec.variables().len();
        let inverted_vars: Vec<bool> = (0..n)
            .map(|i| spec.contains(&(spec.one() / spec.var_at(i))))
            .collect();
        // inverted elements that are not units times monomials
        let dens: Vec<RingElem> = spec
            .inverted()
            .iter()
            .filter(|d| d.as_laurent_term().is_none())
            .cloned()
            .collect();
        let mut den_combos = vec![(spec.one(), 0u32)];
        for d in &dens {
            let mut next = Vec::new();
            for (prod, k) in &den_combos {
                let mut p = prod.clone();
                for j in 0..=(degree - k) {
                    next.push((p.clone(), k + j));
                    p = &p * d;
                }
            }
            den_combos = next;
        }
        den_combos.sort_by_key(|c| c.1);
        let coeffs: Vec<BigInt> = match spec.base() {
            Base::Integers => (1..=height as i64)
                .flat_map(|c| [BigInt::from(c), BigInt::from(-c)])
                .collect(),
            Base::PrimeField(p) => (1..p)
                .filter(|&c| c.min(p - c) <= height)
                .map(BigInt::from)
                .collect(),
        };
        let mut params = Vec::new();
        for (prod, k) in &den_combos {
            let dinv = spec.one() / prod;
            for exps in exponent_vectors(n, degree - k, &inverted_vars) {
                let mu = monomial(spec, &exps) * &dinv;
                for c in &coeffs {
                    params.push(spec.integer(c.clone()) * &mu);
                }
            }
        }
        Ok(ParamMenu { params, inverted_vars, den_combos, height, degree, base: spec.base() })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Exact membership test.
    pub fn contains(&self, e: &RingElem) -> bool {
        if e.is_zero() {
            return false;
        }
        self.den_combos.iter().any(|(prod, k)| {
            let Some((c, exps)) = (e * prod).as_laurent_term() else {
                return false;
            };
            let c_ok = match self.base {
                Base::Integers => c.abs().to_u64().is_some_and(|a| a >= 1 && a <= self.height),
                Base::PrimeField(p) => {
                    let c = c.to_u64().unwrap_or(0);
                    c != 0 && c.min(p - c) <= self.height
                }
            };
            let signs_ok = exps.iter().zip(&self.inverted_vars).all(|(e, inv)| *e >= 0 || *inv);
            let deg: u64 = exps.iter().map(|e| e.unsigned_abs()).sum::<u64>() + *k as u64;
            c_ok && signs_ok && deg <= self.degree as u64
        })
    }
}

fn elementary(kind: ElemKind, r: RingElem) -> Token {
    match kind {
        ElemKind::E12 => Token::E12(r),
        ElemKind::E21 => Token::E21(r),
    }
}

/// Solve `m = E(k₁,a₁)⋯E(k_ℓ,a_ℓ)` exactly, kinds alternating from `start`,
/// with every parameter in the menu.
fn solve_tail_exact(m: &Mat2, len: usize, start: ElemKind, menu: &ParamMenu) -> Option<Vec<Token>> {
    let ok = |x: &RingElem| menu.contains(x);
    let one = m.a11.one_like();
    let params: Vec<RingElem> = match (len, start) {
        (0, _) => return m.is_identity().then(Vec::new),
        (1, ElemKind::E12) => {
            (m.a21.is_zero() && m.a11.is_one() && m.a22.is_one()).then(|| vec![m.a12.clone()])?
        }
        (1, ElemKind::E21) => {
            (m.a12.is_zero() && m.a11.is_one() && m.a22.is_one()).then(|| vec![m.a21.clone()])?
        }
        (2, ElemKind::E12) => {
            if !m.a22.is_one() {
                return None;
            }
            vec![m.a12.clone(), m.a21.clone()]
        }
        (2, ElemKind::E21) => {
            if !m.a11.is_one() {
                return None;
            }
            vec![m.a21.clone(), m.a12.clone()]
        }
        (3, ElemKind::E12) => {
            let b = &m.a21;
            if !ok(b) {
                return None;
            }
            vec![(&m.a11 - &one) / b, b.clone(), (&m.a22 - &one) / b]
        }
        (3, ElemKind::E21) => {
            let b = &m.a12;
            if !ok(b) {
                return None;
            }
            vec![(&m.a22 - &one) / b, b.clone(), (&m.a11 - &one) / b]
        }
        _ => unreachable!("tails have length at most 3"),
    };
    if !params.iter().all(ok) {
        return None;
    }
    let mut kind = start;
    let tokens: Vec<Token> = params
        .into_iter()
        .map(|p| {
            let t = elementary(kind, p);
            kind = other_kind(kind);
            t
        })
        .collect();
    let prod = tokens
        .iter()
        .fold(Mat2::new(one.clone(), one.zero_like(), one.zero_like(), one.clone()), |acc, t| {
            acc.mul(&t.eval(&[]).unwrap())
        });
    (prod == *m).then_some(tokens)
}

/// Fingerprint version of the tail test: `false` only if no exact solution
/// can exist.
fn tail_possible(fp: &Fingerprinter, m: &FMat, len: usize, start: ElemKind, set: &HashMap<F, ()>) -> bool {
    let one = fp.one();
    let zero = fp.zero();
    let has = |x: &F| set.contains_key(x);
    let [m11, m12, m21, m22] = *m;
    match (len, start) {
        (0, _) => m11 == one && m22 == one && m12 == zero && m21 == zero,
        (1, ElemKind::E12) => m21 == zero && m11 == one && m22 == one && has(&m12),
        (1, ElemKind::E21) => m12 == zero && m11 == one && m22 == one && has(&m21),
        (2, ElemKind::E12) => m22 == one && has(&m12) && has(&m21) && m11 == fp.add(one, fp.mul(m12, m21)),
        (2, ElemKind::E21) => m11 == one && has(&m12) && has(&m21) && m22 == fp.add(one, fp.mul(m12, m21)),
        (3, _) => {
            let (b, x, y) = match start {
                ElemKind::E12 => (m21, m11, m22),
                ElemKind::E21 => (m12, m22, m11),
            };
            if !has(&b) {
                return false;
            }
            match fp.inv(b) {
                Some(bi) => has(&fp.mul(fp.sub(x, one), bi)) && has(&fp.mul(fp.sub(y, one), bi)),
                None => true,
            }
        }
        _ => unreachable!(),
    }
}

fn decode_prefix(mut idx: u128, len: usize, n: usize) -> (ElemKind, Vec<usize>) {
    let first = if idx.is_multiple_of(2) { ElemKind::E12 } else { ElemKind::E21 };
    idx /= 2;
    let digits = (0..len)
        .map(|_| {
            let d = (idx % n as u128) as usize;
            idx /= n as u128;
            d
        })
        .collect();
    (first, digits)
}

fn prefix_count(len: usize, n: usize) -> u128 {
    if len == 0 {
        1
    } else {
        (n as u128).saturating_pow(len as u32).saturating_mul(2)
    }
}

fn check_target(target: &Mat2, spec: &RingSpec) -> Result<(), SearchError> {
    if !target.in_sl2_of(spec) {
        return Err(SearchError::NotInSl2);
    }
    Ok(())
}

/// Search for `target` as a word over the budget's menu.
pub fn bounded_e2_search(target: &Mat2, spec: &RingSpec, budget: &SearchBudget) -> Result<SearchOutcome, SearchError> {
    check_target(target, spec)?;
    match &budget.menu {
        Menu::Parametric => parametric_search(target, spec, budget),
        Menu::Finite(ms) => finite_search(target, spec, ms, budget),
    }
}

fn parametric_search(target: &Mat2, spec: &RingSpec, budget: &SearchBudget) -> Result<SearchOutcome, SearchError> {
    let menu = ParamMenu::new(spec, budget.coeff_height_cap, budget.degree_cap)?;
    let n = menu.len();
    let guard: Vec<&RingElem> = target.entries().to_vec();
    let fp = Fingerprinter::new(spec, &guard, 0x5eed_0001);
    let unit = if fp.is_some() { 1 } else { EXACT_COST };
    let estimate: u128 = (0..=budget.max_depth)
        .map(|d| prefix_count(d.saturating_sub(3), n).saturating_mul(unit))
        .fold(0u128, |a, b| a.saturating_add(b));
    let ceiling = budget.ceiling();
    if estimate > ceiling {
        return Err(SearchError::BudgetTooLarge { estimate, ceiling });
    }
    let fps: Option<(Vec<F>, HashMap<F, ()>, FMat)> = fp.as_ref().map(|fp| {
        let vals: Vec<F> = menu.params.iter().map(|p| fp.elem(p).expect("guarded point")).collect();
        let set = vals.iter().map(|v| (*v, ())).collect();
        (vals, set, fp.mat(target).expect("guarded point"))
    });

    let mut stats = SearchStats {
        depth: 0,
        words_enumerated: 0,
        prefixes_evaluated: 0,
        dedup_hits: 0,
        menu_size: n,
        fingerprinted: fp.is_some(),
        engine: "parametric",
        found: false,
    };
    for d in 0..=budget.max_depth {
        let k = d.saturating_sub(3);
        let tail = d - k;
        let count = prefix_count(k, n);
        let try_prefix = |idx: u128| -> Option<Vec<Token>> {
            let (first, digits) = decode_prefix(idx, k, n);
            let kinds: Vec<ElemKind> = (0..k)
                .map(|i| if i % 2 == 0 { first } else { other_kind(first) })
                .collect();
            let starts: Vec<ElemKind> = if k == 0 {
                vec![ElemKind::E12, ElemKind::E21]
            } else {
                vec![other_kind(kinds[k - 1])]
            };
            if let (Some(fp), Some((vals, set, tf))) = (&fp, &fps) {
                let mut m = *tf;
                for i in 0..k {
                    m = fp.left_elem(kinds[i], fp.neg(vals[digits[i]]), &m);
                }
                if !starts.iter().any(|s| tail_possible(fp, &m, tail, *s, set)) {
                    return None;
                }
            }
            let mut m = target.clone();
            for i in 0..k {
                m = Mat2::elem(kinds[i], -&menu.params[digits[i]]).mul(&m);
            }
            for s in starts {
                if let Some(t) = solve_tail_exact(&m, tail, s, &menu) {
                    let mut word: Vec<Token> = (0..k)
                        .map(|i| elementary(kinds[i], menu.params[digits[i]].clone()))
                        .collect();
                    word.extend(t);
                    return Some(word);
                }
            }
            None
        };
        let hit = if count <= 64 {
            (0..count).find_map(|i| try_prefix(i).map(|w| (i, w)))
        } else {
            (0..count as u64)
                .into_par_iter()
                .find_map_first(|i| try_prefix(i as u128).map(|w| (i as u128, w)))
        };
        stats.depth = d;
        match hit {
            Some((i, w)) => {
                stats.prefixes_evaluated += i + 1;
                stats.words_enumerated = stats.words_enumerated.saturating_add(words_at(d, n));
                stats.found = true;
                let word = GenWord::new(w);
                debug_assert!(word_eval(&word, &[], spec).unwrap() == *target);
                return Ok(SearchOutcome { verdict: SearchVerdict::Found(word), stats, table: Vec::new() });
            }
            None => {
                stats.prefixes_evaluated += count;
                stats.words_enumerated = stats.words_enumerated.saturating_add(words_at(d, n));
            }
        }
    }
    Ok(SearchOutcome { verdict: SearchVerdict::NotFoundAtBound, stats, table: Vec::new() })
}

/// Number of reduced alternating words of length exactly `d`.
fn words_at(d: usize, n: usize) -> u128 {
    prefix_count(d, n)
}

// ---------------------------------------------------------------------------
// finite menus

fn as_token(m: &Mat2, index: usize) -> Token {
    let one_diag = m.a11.is_one() && m.a22.is_one();
    if one_diag && m.a21.is_zero() {
        Token::E12(m.a12.clone())
    } else if one_diag && m.a12.is_zero() {
        Token::E21(m.a21.clone())
    } else if m.a12.is_zero() && m.a21.is_zero() {
        Token::Diag(m.a11.clone(), m.a22.clone())
    } else {
        Token::Named(index)
    }
}

fn decode_word(mut idx: u128, len: usize, n: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = (idx % n as u128) as usize;
            idx /= n as u128;
            d
        })
        .collect()
}

/// Stored half-words and their fingerprint index.
type Layer = (Vec<Vec<usize>>, HashMap<FMat, Vec<usize>>);

fn finite_search(target: &Mat2, spec: &RingSpec, menu: &[Mat2], budget: &SearchBudget) -> Result<SearchOutcome, SearchError> {
    // generators and inverses, deduplicated
    let mut gens: Vec<Mat2> = Vec::new();
    for m in menu {
        let mi = m.inv().map_err(|_| SearchError::InvalidBudget(format!("menu matrix {m} is not in SL2")))?;
        for x in [m.clone(), mi] {
            if !gens.contains(&x) {
                gens.push(x);
            }
        }
    }
    let n = gens.len();
    let inv_of: Vec<usize> = gens
        .iter()
        .map(|g| {
            let gi = g.inv().unwrap();
            gens.iter().position(|x| *x == gi).unwrap()
        })
        .collect();
    let mut guard: Vec<&RingElem> = target.entries().to_vec();
    for g in &gens {
        guard.extend(g.entries());
    }
    let fp = Fingerprinter::new(spec, &guard, 0x5eed_0002);
    let ceiling = budget.ceiling();
    let unit = if fp.is_some() { 1 } else { EXACT_COST };
    let mut estimate: u128 = 0;
    for d in 0..=budget.max_depth {
        let k2 = d / 2;
        let k1 = d - k2;
        let store = (n as u128).saturating_pow(k2 as u32);
        if store > LAYER_CAP {
            return Err(SearchError::BudgetTooLarge { estimate: store, ceiling: LAYER_CAP });
        }
        estimate = estimate.saturating_add(
            (n as u128).saturating_pow(k1 as u32).saturating_add(store).saturating_mul(unit),
        );
    }
    if estimate > ceiling {
        return Err(SearchError::BudgetTooLarge { estimate, ceiling });
    }
    let gfp: Option<Vec<FMat>> = fp.as_ref().map(|f| gens.iter().map(|g| f.mat(g).unwrap()).collect());
    let tfp = fp.as_ref().map(|f| f.mat(target).unwrap());
    let exact_product = |w: &[usize]| -> Mat2 { w.iter().fold(Mat2::identity(spec), |acc, &i| acc.mul(&gens[i])) };

    let mut stats = SearchStats {
        depth: 0,
        words_enumerated: 0,
        prefixes_evaluated: 0,
        dedup_hits: 0,
        menu_size: n,
        fingerprinted: fp.is_some(),
        engine: "finite",
        found: false,
    };
    // stored layers by length: representative words, keyed by fingerprint
    let mut layers: HashMap<usize, Layer> = HashMap::new();
    for d in 0..=budget.max_depth {
        let k2 = d / 2;
        let k1 = d - k2;
        layers.entry(k2).or_insert_with(|| {
            let mut reps: Vec<Vec<usize>> = Vec::new();
            let mut index: HashMap<FMat, Vec<usize>> = HashMap::new();
            let mut exact_reps: Vec<Mat2> = Vec::new();
            for idx in 0..(n as u128).pow(k2 as u32) {
                let w = decode_word(idx, k2, n);
                let key = match (&fp, &gfp) {
                    (Some(f), Some(g)) => w.iter().fold(f.mat_identity(), |acc, &i| f.mat_mul(&acc, &g[i])),
                    _ => [[0; LANES]; 4],
                };
                let prod = exact_product(&w);
                let bucket = index.entry(key).or_default();
                if bucket.iter().any(|&j| exact_reps[j] == prod) {
                    stats.dedup_hits += 1;
                    continue;
                }
                bucket.push(reps.len());
                reps.push(w);
                exact_reps.push(prod);
            }
            (reps, index)
        });
        let (reps, index) = &layers[&k2];
        let query = |idx: u128| -> Option<Vec<usize>> {
            let u = decode_word(idx, k1, n);
            let key = match (&fp, &gfp, &tfp) {
                (Some(f), Some(g), Some(t)) => u.iter().fold(*t, |acc, &i| f.mat_mul(&g[inv_of[i]], &acc)),
                _ => [[0; LANES]; 4],
            };
            let cands = index.get(&key)?;
            let rest = u.iter().fold(target.clone(), |acc, &i| gens[inv_of[i]].mul(&acc));
            cands.iter().find_map(|&j| {
                (exact_product(&reps[j]) == rest).then(|| {
                    let mut w = u.clone();
                    w.extend(&reps[j]);
                    w
                })
            })
        };
        let count = (n as u128).pow(k1 as u32);
        let hit = (0..count as u64)
            .into_par_iter()
            .find_map_first(|i| query(i as u128).map(|w| (i as u128, w)));
        stats.depth = d;
        stats.words_enumerated = stats.words_enumerated.saturating_add((n as u128).saturating_pow(d as u32));
        match hit {
            Some((i, w)) => {
                stats.prefixes_evaluated += i + 1;
                stats.found = true;
                let word = GenWord::new(w.iter().map(|&i| as_token(&gens[i], i)).collect());
                return Ok(SearchOutcome { verdict: SearchVerdict::Found(word), stats, table: gens });
            }
            None => stats.prefixes_evaluated += count,
        }
    }
    Ok(SearchOutcome { verdict: SearchVerdict::NotFoundAtBound, stats, table: gens })
}

// ---------------------------------------------------------------------------
// H₀ menus

/// Capped entries `c·μ` with `|c| ≤ height`, `μ` a Laurent monomial in the
/// variables of `r` (negative exponents only for inverted ones) of total
/// degree `≤ degree`, together with 0.
fn capped_entries(r: &RingSpec, height: u64, degree: u32) -> Vec<RingElem> {
    let n = r.variables().len();
    let inverted: Vec<bool> = (0..n).map(|i| r.contains(&(r.one() / r.var_at(i)))).collect();
    let mut out = vec![r.zero()];
    for exps in exponent_vectors(n, degree, &inverted) {
        let mu = monomial(r, &exps);
        for c in 1..=height as i64 {
            for s in [c, -c] {
                let e = r.int(s) * &mu;
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        }
    }
    out
}

/// Capped elements of `SL₂(R)` and their `D(1/π,1)`-conjugates.
pub fn h0_menu(r: &RingSpec, pi: &RingElem, height: u64, degree: u32) -> Vec<Mat2> {
    let es = capped_entries(r, height, degree);
    let mut base: Vec<Mat2> = Vec::new();
    let one = r.one();
    for a in &es {
        for b in &es {
            for c in &es {
                let m = if a.is_zero() {
                    // bc = -1
                    if b.is_zero() || !r.contains(&(one.clone() / b)) || *c != -(one.clone() / b) {
                        continue;
                    }
                    for d in &es {
                        let m = Mat2::new(a.clone(), b.clone(), c.clone(), d.clone());
                        if !m.is_identity() && !base.contains(&m) {
                            base.push(m);
                        }
                    }
                    continue;
                } else {
                    let d = (&one + b * c) / a;
                    if !r.contains(&d) {
                        continue;
                    }
                    Mat2::new(a.clone(), b.clone(), c.clone(), d)
                };
                if !m.is_identity() && !base.contains(&m) {
                    base.push(m);
                }
            }
        }
    }
    let dinv = Mat2::diag(pi.pow(-1), one.clone()).unwrap();
    let dpi = Mat2::diag(pi.clone(), one).unwrap();
    let conj: Vec<Mat2> = base.iter().map(|m| dinv.mul(m).mul(&dpi)).collect();
    for m in conj {
        if !base.contains(&m) {
            base.push(m);
        }
    }
    base
}

/// Search inside `H₀ = ⟨SL₂(R) ∪ D(1/π,1)SL₂(R)D(π,1)⟩` over the capped
/// menu; entries of the menu use `entry_height` and `entry_degree`.
pub fn bounded_h0_search(
    target: &Mat2,
    r: &RingSpec,
    pi: &RingElem,
    max_depth: usize,
    entry_height: u64,
    entry_degree: u32,
    ceiling: Option<u128>,
) -> Result<SearchOutcome, SearchError> {
    let h = r.localize(vec![pi.clone()]).map_err(|e| SearchError::InvalidBudget(e.to_string()))?;
    check_target(target, &h)?;
    let menu = h0_menu(r, pi, entry_height, entry_degree);
    let mut budget = SearchBudget::finite(max_depth, menu);
    budget.coeff_height_cap = entry_height;
    budget.degree_cap = entry_degree;
    budget.ceiling = ceiling;
    let mut out = bounded_e2_search(target, &h, &budget)?;
    out.stats.engine = "h0";
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Base;

    fn laurent_t() -> RingSpec {
        let zt = RingSpec::polynomial(Base::Integers, &["t"]).unwrap();
        let t = zt.var("t");
        zt.localize(vec![t]).unwrap()
    }

    #[test]
    fn menu_membership_matches_enumeration() {
        let s = laurent_t();
        let m = ParamMenu::new(&s, 2, 2).unwrap();
        // exponents -2..2, coefficients ±1, ±2
        assert_eq!(m.len(), 5 * 4);
        assert!(m.params.iter().all(|p| m.contains(p)));
        let t = s.var("t");
        assert!(!m.contains(&(s.int(3) * &t)));
        assert!(!m.contains(&t.pow(3)));
        assert!(!m.contains(&(&t + s.one())));
    }

    #[test]
    fn token_found_at_depth_one() {
        let s = laurent_t();
        let target = Mat2::e12(s.one() / s.var("t"));
        let out = bounded_e2_search(&target, &s, &SearchBudget::parametric(1, 16, 8)).unwrap();
        let w = out.found().unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(word_eval(w, &[], &s).unwrap(), target);
    }

    #[test]
    fn planted_product_found() {
        let s = laurent_t();
        let t = s.var("t");
        let w = GenWord::new(vec![
            Token::E12(s.int(3) * &t),
            Token::E21(s.int(-2) / (&t * &t)),
            Token::E12(s.int(5)),
            Token::E21(t.clone()),
        ]);
        let target = word_eval(&w, &[], &s).unwrap();
        let out = bounded_e2_search(&target, &s, &SearchBudget::parametric(4, 5, 2)).unwrap();
        let found = out.found().unwrap();
        assert!(found.len() <= 4);
        assert_eq!(word_eval(found, &[], &s).unwrap(), target);
    }

    #[test]
    fn budget_ceiling() {
        let s = laurent_t();
        let mut b = SearchBudget::parametric(9, 16, 8);
        b.ceiling = Some(1000);
        let target = Mat2::identity(&s);
        assert!(matches!(bounded_e2_search(&target, &s, &b), Err(SearchError::BudgetTooLarge { .. })));
    }

    #[test]
    fn finite_menu_meet_in_the_middle() {
        let s = laurent_t();
        let gens = crate::sl2::e2_generating_set(&s).unwrap();
        let target = gens[0].mul(&gens[1]).mul(&gens[2].inv().unwrap()).mul(&gens[4]);
        let out = bounded_e2_search(&target, &s, &SearchBudget::finite(4, gens)).unwrap();
        let w = out.found().unwrap();
        assert_eq!(word_eval(w, &out.table, &s).unwrap(), target);
        assert!(out.stats.dedup_hits > 0);
    }

    #[test]
    fn h0_menu_is_in_h0() {
        let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
        let menu = h0_menu(&z, &z.int(2), 1, 0);
        let h = z.localize(vec![z.int(2)]).unwrap();
        assert!(menu.iter().all(|m| m.in_sl2_of(&h)));
        let target = menu[3].mul(&menu[menu.len() - 1]);
        let out = bounded_h0_search(&target, &z, &z.int(2), 2, 1, 0, None).unwrap();
        assert!(out.found().is_some());
    }
}
