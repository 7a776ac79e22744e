//! Explicit matrices outside `E₂(S)` with machine-checked hypotheses.
//!
//! Every certificate stores `a`, `b`, `h = a·b·a⁻¹` and the ingredients they
//! are built from.  Checks are recomputed from those stored values, so a
//! tampered certificate fails verification.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::amalgam::{classify_side, SideClass};
use crate::ring::{divides, Base, is_prime_supported, pair_principal_in_quotient, PairVerdict, Primality, RingElem, RingError, RingSpec, Valuation};
use crate::search::{bounded_e2_search, SearchBudget, SearchError, SearchOutcome};
use crate::sl2::Mat2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("f is divisible by t")]
    DivisibleByT,
    #[error("p divides f0 = {0}")]
    PDividesF0(String),
    #[error("p is not prime: {0}")]
    NotPrime(String),
    #[error("the pair generates a principal ideal ({0})")]
    PairPrincipal(String),
    #[error("principality of the pair is undecided: {0}")]
    UndecidedPair(String),
    #[error("congruence condition violated: {0}")]
    CongruenceViolated(String),
    #[error("beta must be nonzero")]
    BetaZero,
    #[error("not in SL2: {0}")]
    NotInSl2(String),
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Mainstep,
    Laurent,
    MoreExamples,
}

impl WitnessKind {
    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::Mainstep => "Mainstep",
            WitnessKind::Laurent => "Laurent",
            WitnessKind::MoreExamples => "MoreExamples",
        }
    }

    pub fn from_name(s: &str) -> Option<WitnessKind> {
        match s {
            "Mainstep" => Some(WitnessKind::Mainstep),
            "Laurent" => Some(WitnessKind::Laurent),
            "MoreExamples" => Some(WitnessKind::MoreExamples),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimTier {
    /// Every hypothesis of the underlying theorem was verified.
    TheoremBacked,
    /// Only the bounded search supports the claim.
    SearchVerifiedAtBound,
}

impl ClaimTier {
    pub fn name(self) -> &'static str {
        match self {
            ClaimTier::TheoremBacked => "TheoremBacked",
            ClaimTier::SearchVerifiedAtBound => "SearchVerifiedAtBound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Required checks decide the claim tier; the rest are informational.
    pub required: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, required: bool, detail: impl Into<String>) -> Check {
        Check { name: name.to_string(), passed, required, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchBound {
    /// 0 means no search was run.
    pub depth: usize,
    pub coeff_height_cap: u64,
    pub degree_cap: u32,
    pub words_enumerated: u128,
    pub found: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate {
    pub kind: WitnessKind,
    /// `R₀`.
    pub base: RingSpec,
    /// The polynomial ring the matrices are built over (`R₀[s,t]` or `R₀[t]`).
    pub ambient: RingSpec,
    /// The ring `S` in whose `SL₂` the witness lives.
    pub ring: RingSpec,
    pub pi: RingElem,
    pub ingredients: BTreeMap<String, RingElem>,
    pub a: Mat2,
    pub b: Mat2,
    pub h: Mat2,
    pub primality: Primality,
    pub checks: Vec<Check>,
    pub search_bound: SearchBound,
    pub claim: String,
    pub claim_tier: ClaimTier,
}

impl WitnessCertificate {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_required_pass(&self) -> bool {
        self.checks.iter().filter(|c| c.required).all(|c| c.passed)
    }
}

fn tier(checks: &[Check], primality: Primality) -> ClaimTier {
    if primality == Primality::Verified && checks.iter().filter(|c| c.required).all(|c| c.passed) {
        ClaimTier::TheoremBacked
    } else {
        ClaimTier::SearchVerifiedAtBound
    }
}

fn embed(e: &RingElem, spec: &RingSpec, what: &str) -> Result<RingElem, WitnessError> {
    e.embed(spec.ring())
        .ok_or_else(|| WitnessError::Malformed(format!("{what} = {e} is not in {spec}")))
}

fn in_subring(e: &RingElem, allowed: &[usize]) -> bool {
    e.is_polynomial() && e.support().iter().all(|i| allowed.contains(i))
}

/// `e ∈ R₀[s, 1/t]`: the denominator is a unit times a power of `t` and no
/// positive power of `t` survives.
fn only_s_and_inv_t(e: &RingElem, t: usize) -> bool {
    let Some((c, mono)) = e.denom().as_term() else {
        return false;
    };
    let unit = match e.base() {
        Base::Integers => c.abs().is_one(),
        Base::PrimeField(_) => !c.is_zero(),
    };
    let k = mono[t];
    let only_t = mono.iter().enumerate().all(|(i, &x)| i == t || x == 0);
    let top = e.numer().degree_in(t).unwrap_or(0);
    unit && only_t && top <= k
}

/// The ambient ring `R₀[s,t]`.
pub fn mainstep_ambient(base: &RingSpec) -> Result<RingSpec, WitnessError> {
    if base.is_localized() {
        return Err(WitnessError::Malformed("the base ring must be a polynomial ring".into()));
    }
    Ok(base.with_extra_vars(&["s", "t"])?)
}

/// The ambient ring `R₀[t]`.
pub fn laurent_ambient(base: &RingSpec) -> Result<RingSpec, WitnessError> {
    if base.is_localized() {
        return Err(WitnessError::Malformed("the base ring must be a polynomial ring".into()));
    }
    Ok(base.with_extra_vars(&["t"])?)
}

struct MainData {
    ambient: RingSpec,
    f: RingElem,
    f0: RingElem,
    g: RingElem,
    p: RingElem,
    s_ring: RingSpec,
}

fn t_index(ambient: &RingSpec) -> usize {
    ambient.variables().len() - 1
}

fn base_indices(base: &RingSpec) -> Vec<usize> {
    (0..base.variables().len()).collect()
}

fn main_data(base: &RingSpec, f: &RingElem, p: &RingElem) -> Result<MainData, WitnessError> {
    let ambient = mainstep_ambient(base)?;
    let f = embed(f, &ambient, "f")?;
    let p = embed(p, &ambient, "p")?;
    if !f.is_polynomial() {
        return Err(WitnessError::Malformed(format!("f = {f} must be a polynomial")));
    }
    if !in_subring(&p, &base_indices(base)) || p.is_zero() {
        return Err(WitnessError::Malformed(format!("p = {p} must be a nonzero element of {base}")));
    }
    let t = t_index(&ambient);
    let f0 = RingElem::from_poly(f.numer().substitute_zero(t));
    if f0.is_zero() {
        return Err(WitnessError::DivisibleByT);
    }
    let s = ambient.var("s");
    let g = ambient.one() - &s * &f0;
    let inv: Vec<RingElem> = [s, ambient.var("t"), f0.clone(), f.clone()]
        .into_iter()
        .filter(|e| !e.is_unit_constant())
        .collect();
    let s_ring = ambient.localize(inv)?;
    Ok(MainData { ambient, f, f0, g, p, s_ring })
}

fn primality_of(p: &RingElem, base: &RingSpec, assert_prime: bool) -> Result<Primality, WitnessError> {
    let p = embed(p, base, "p")?;
    match is_prime_supported(&p, base) {
        Ok(true) => Ok(Primality::Verified),
        Ok(false) => Err(WitnessError::NotPrime(format!("{p} is not prime in {base}"))),
        Err(_) if assert_prime => Ok(Primality::Asserted),
        Err(e) => Err(WitnessError::NotPrime(format!("primality of {p} in {base} could not be decided ({e}); assert it to proceed"))),
    }
}

/// `a = E₂₁(g/p)`.
fn mainstep_a(d: &MainData) -> Mat2 {
    Mat2::e21(&d.g / &d.p)
}

fn conj(a: &Mat2, b: &Mat2) -> Mat2 {
    a.mul(b).mul(&a.inv().expect("a is unipotent"))
}

/// The matrix of the mainstep construction for `f ∈ R₀[s,t]` and a prime `p`
/// of `R₀` not dividing `f₀`.
pub fn mainstep_witness(base: &RingSpec, f: &RingElem, p: &RingElem, assert_prime: bool) -> Result<WitnessCertificate, WitnessError> {
    let d = main_data(base, f, p)?;
    if divides(&d.p, &d.f0, &d.ambient.polynomial_ring()) {
        return Err(WitnessError::PDividesF0(d.f0.to_string()));
    }
    let primality = primality_of(&d.p, base, assert_prime)?;
    let a = mainstep_a(&d);
    let t = d.ambient.var("t");
    let b = Mat2::e12(&d.p * &d.p / &t);
    let h = conj(&a, &b);
    let ingredients = main_ingredients(&d);
    build(WitnessKind::Mainstep, base, &d.ambient, &d.s_ring, t, ingredients, a, b, h, primality)
}

fn main_ingredients(d: &MainData) -> BTreeMap<String, RingElem> {
    BTreeMap::from([
        ("f".to_string(), d.f.clone()),
        ("f0".to_string(), d.f0.clone()),
        ("g".to_string(), d.g.clone()),
        ("p".to_string(), d.p.clone()),
    ])
}

/// The Laurent-ring matrix `a·b·a⁻¹` with `a = E₂₁(x/y)`, `b = E₁₂(y²/t)`
/// over `R₀[t, 1/t]`, for a pair whose ideal in `R₀` is not principal.
pub fn laurent_witness(base: &RingSpec, x: &RingElem, y: &RingElem) -> Result<WitnessCertificate, WitnessError> {
    let ambient = laurent_ambient(base)?;
    let x = embed(x, &ambient, "x")?;
    let y = embed(y, &ambient, "y")?;
    let allowed = base_indices(base);
    if !in_subring(&x, &allowed) || !in_subring(&y, &allowed) {
        return Err(WitnessError::Malformed(format!("x and y must lie in {base}")));
    }
    match pair_principal_in_quotient(&x, &y, base)? {
        PairVerdict::Principal(g) => return Err(WitnessError::PairPrincipal(format!("generated by {g}"))),
        PairVerdict::Undecided(why) => return Err(WitnessError::UndecidedPair(why)),
        PairVerdict::NonPrincipal(_) => {}
    }
    let t = ambient.var("t");
    let s_ring = ambient.localize(vec![t.clone()])?;
    let a = Mat2::e21(&x / &y);
    let b = Mat2::e12(&y * &y / &t);
    let h = conj(&a, &b);
    let ingredients = BTreeMap::from([("x".to_string(), x), ("y".to_string(), y)]);
    build(WitnessKind::Laurent, base, &ambient, &s_ring, t, ingredients, a, b, h, Primality::Verified)
}

/// The family built from `b′ = [[α,β],[γ,δ]] ∈ SL₂(R₀[s])` with `α ≡ δ mod p`,
/// `p² | β`, `β ≠ 0`, using `b = [[α, β/t],[γt, δ]]`.
pub fn more_examples_witness(
    base: &RingSpec,
    f: &RingElem,
    p: &RingElem,
    bprime: &Mat2,
    assert_prime: bool,
) -> Result<WitnessCertificate, WitnessError> {
    let d = main_data(base, f, p)?;
    if divides(&d.p, &d.f0, &d.ambient.polynomial_ring()) {
        return Err(WitnessError::PDividesF0(d.f0.to_string()));
    }
    let bp = bprime.map(|e| e.embed(d.ambient.ring()).unwrap_or_else(|| e.clone()));
    let mut allowed = base_indices(base);
    allowed.push(allowed.len());
    if bp.entries().iter().any(|e| e.ring() != d.ambient.ring() || !in_subring(e, &allowed)) {
        return Err(WitnessError::NotInSl2(format!("{bprime} must have entries in {base}[s]")));
    }
    if !bp.is_sl2() {
        return Err(WitnessError::NotInSl2(format!("det {bprime} = {}", bp.det())));
    }
    if bp.a12.is_zero() {
        return Err(WitnessError::BetaZero);
    }
    let poly = d.ambient.polynomial_ring();
    if !divides(&d.p, &(&bp.a11 - &bp.a22), &poly) {
        return Err(WitnessError::CongruenceViolated(format!("alpha - delta = {} is not divisible by p", &bp.a11 - &bp.a22)));
    }
    if !divides(&(&d.p * &d.p), &bp.a12, &poly) {
        return Err(WitnessError::CongruenceViolated(format!("beta = {} is not divisible by p^2", bp.a12)));
    }
    let primality = primality_of(&d.p, base, assert_prime)?;
    let t = d.ambient.var("t");
    let a = mainstep_a(&d);
    let b = Mat2::new(bp.a11.clone(), &bp.a12 / &t, &bp.a21 * &t, bp.a22.clone());
    let h = conj(&a, &b);
    let mut ingredients = main_ingredients(&d);
    for (k, e) in ["alpha", "beta", "gamma", "delta"].iter().zip(bp.entries()) {
        ingredients.insert(k.to_string(), e.clone());
    }
    build(WitnessKind::MoreExamples, base, &d.ambient, &d.s_ring, t, ingredients, a, b, h, primality)
}

#[allow(clippy::too_many_arguments)]
fn build(
    kind: WitnessKind,
    base: &RingSpec,
    ambient: &RingSpec,
    ring: &RingSpec,
    pi: RingElem,
    ingredients: BTreeMap<String, RingElem>,
    a: Mat2,
    b: Mat2,
    h: Mat2,
    primality: Primality,
) -> Result<WitnessCertificate, WitnessError> {
    let mut cert = WitnessCertificate {
        kind,
        base: base.clone(),
        ambient: ambient.clone(),
        ring: ring.clone(),
        pi,
        ingredients,
        a,
        b,
        h,
        primality,
        checks: Vec::new(),
        search_bound: SearchBound::default(),
        claim: claim_text(kind).to_string(),
        claim_tier: ClaimTier::SearchVerifiedAtBound,
    };
    cert.checks = compute_checks(&cert)?;
    cert.claim_tier = tier(&cert.checks, cert.primality);
    Ok(cert)
}

fn claim_text(kind: WitnessKind) -> &'static str {
    match kind {
        WitnessKind::Mainstep | WitnessKind::MoreExamples => {
            "h is in SL2(S) but not in H0, hence not in E2(S)"
        }
        WitnessKind::Laurent => {
            "SL2(S) != E2(S): a is in A but not in (A∩H)U, b is in B but not in U, and h = a b a^-1 lies in SL2(S)"
        }
    }
}

fn ingredient<'a>(cert: &'a WitnessCertificate, key: &str) -> Result<&'a RingElem, WitnessError> {
    cert.ingredients
        .get(key)
        .ok_or_else(|| WitnessError::Malformed(format!("missing ingredient {key}")))
}

/// All checks, recomputed from the stored data.
pub fn compute_checks(cert: &WitnessCertificate) -> Result<Vec<Check>, WitnessError> {
    let amb = &cert.ambient;
    let t = t_index(amb);
    let v = Valuation::new(amb, &cert.pi)?;
    let mut out = Vec::new();

    let det = cert.h.det();
    out.push(Check::new("det_h_is_one", det.is_one(), true, format!("det(h) = {det}")));
    let conj_ok = cert.a.is_sl2() && conj(&cert.a, &cert.b) == cert.h;
    out.push(Check::new("h_equals_a_b_a_inv", conj_ok, true, "h = a*b*a^-1 recomputed exactly"));
    out.push(Check::new(
        "h_in_sl2_of_ring",
        det.is_one() && cert.h.entries().iter().all(|e| cert.ring.contains(e)),
        true,
        format!("entries checked against {}", cert.ring),
    ));
    let a_side = classify_side(&cert.a, &v).map(|p| p.in_a()).unwrap_or(false);
    out.push(Check::new("a_in_A", a_side, true, "entries of a have nonnegative t-adic valuation"));
    let (b_ok, b_detail) = match classify_side(&cert.b, &v) {
        Ok(p) => (
            p.class == SideClass::InBOnly,
            format!(
                "class {:?}, valuations {}",
                p.class,
                p.valuations.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
            ),
        ),
        Err(e) => (false, e.to_string()),
    };
    out.push(Check::new("b_in_B_not_U", b_ok, true, b_detail));

    match cert.kind {
        WitnessKind::Mainstep | WitnessKind::MoreExamples => {
            let f = ingredient(cert, "f")?;
            let f0 = ingredient(cert, "f0")?;
            let g = ingredient(cert, "g")?;
            let p = ingredient(cert, "p")?;
            let s = amb.var("s");
            let poly = amb.polynomial_ring();
            let f0_ok = *f0 == RingElem::from_poly(f.numer().substitute_zero(t)) && !f0.is_zero();
            out.push(Check::new("t_does_not_divide_f", f0_ok, true, format!("f0 = {f0}")));
            let g_ok = *g == amb.one() - &s * f0;
            out.push(Check::new("g_is_one_minus_s_f0", g_ok, true, format!("g = {g}")));
            let a_ok = cert.a == Mat2::e21(g / p);
            out.push(Check::new("a_matches_ingredients", a_ok, true, "a = [[1,0],[g/p,1]]"));
            let b_expected = match cert.kind {
                WitnessKind::Mainstep => Some(Mat2::e12(p * p / amb.var("t"))),
                _ => {
                    let tt = amb.var("t");
                    let e = |k| ingredient(cert, k).cloned();
                    Some(Mat2::new(e("alpha")?, e("beta")? / &tt, e("gamma")? * &tt, e("delta")?))
                }
            };
            out.push(Check::new("b_matches_ingredients", b_expected.as_ref() == Some(&cert.b), true, "b rebuilt from the ingredients"));
            let prime_detail = match cert.primality {
                Primality::Verified => "verified",
                Primality::Asserted => "asserted",
            };
            let prime_ok = match is_prime_supported(&p.embed(cert.base.ring()).unwrap_or_else(|| p.clone()), &cert.base) {
                Ok(b) => b,
                Err(_) => cert.primality == Primality::Asserted,
            };
            out.push(Check::new("p_prime", prime_ok, true, format!("p = {p}, {prime_detail}")));
            out.push(Check::new("p_does_not_divide_f0", !divides(p, f0, &poly), true, format!("p = {p}, f0 = {f0}")));
            out.push(Check::new("p_does_not_divide_g", !divides(p, g, &poly), true, format!("g = {g}")));
            let sf0f = &(&s * f0) * f;
            let t_prime = !RingElem::from_poly(sf0f.numer().substitute_zero(t)).is_zero();
            out.push(Check::new("t_prime_in_tilde_ring", t_prime, true, "t does not divide s*f0*f"));
            let want: Vec<RingElem> = [s.clone(), amb.var("t"), f0.clone(), f.clone()]
                .into_iter()
                .filter(|e| !e.is_unit_constant())
                .collect();
            let ring_ok = amb.localize(want).map(|r| r == cert.ring).unwrap_or(false);
            out.push(Check::new("ring_is_localization", ring_ok, true, format!("S = {}", cert.ring)));
            let only = cert.h.entries().iter().all(|e| only_s_and_inv_t(e, t));
            let required = cert.kind == WitnessKind::Mainstep;
            out.push(Check::new(
                "entries_only_s_and_inv_t",
                only,
                required,
                if only { "entries lie in R0[s,1/t]" } else { "some entry involves t or 1/s" },
            ));
            if cert.kind == WitnessKind::MoreExamples {
                let e = |k| ingredient(cert, k).cloned();
                let (al, be, ga, de) = (e("alpha")?, e("beta")?, e("gamma")?, e("delta")?);
                let bp = Mat2::new(al.clone(), be.clone(), ga, de.clone());
                out.push(Check::new("bprime_in_sl2", bp.is_sl2(), true, format!("b' = {bp}")));
                out.push(Check::new("alpha_congruent_delta_mod_p", divides(p, &(&al - &de), &poly), true, ""));
                out.push(Check::new("p_squared_divides_beta", !be.is_zero() && divides(&(p * p), &be, &poly), true, format!("beta = {be}")));
            }
            out.push(Check::new(
                "equations_audit",
                true,
                false,
                "the contradiction uses only p prime, p not dividing f0 and p not dividing g = 1 - s*f0; all three are checked above",
            ));
        }
        WitnessKind::Laurent => {
            let x = ingredient(cert, "x")?;
            let y = ingredient(cert, "y")?;
            let a_ok = !y.is_zero() && cert.a == Mat2::e21(x / y);
            out.push(Check::new("a_matches_ingredients", a_ok, true, "a = [[1,0],[x/y,1]]"));
            let b_ok = cert.b == Mat2::e12(y * y / &cert.pi);
            out.push(Check::new("b_matches_ingredients", b_ok, true, "b = [[1,y^2/t],[0,1]]"));
            let (ok, detail) = match pair_principal_in_quotient(x, y, &cert.base) {
                Ok(PairVerdict::NonPrincipal(why)) => (true, why),
                Ok(other) => (false, format!("{other:?}")),
                Err(e) => (false, e.to_string()),
            };
            out.push(Check::new("pair_not_principal", ok, true, detail));
            let want = amb.localize(vec![cert.pi.clone()]).map(|r| r == cert.ring).unwrap_or(false);
            out.push(Check::new("ring_is_localization", want, true, format!("S = {}", cert.ring)));
        }
    }
    let sb = &cert.search_bound;
    let detail = if sb.depth == 0 {
        "no search run".to_string()
    } else {
        format!("depth {}, caps ({}, {}), {} words", sb.depth, sb.coeff_height_cap, sb.degree_cap, sb.words_enumerated)
    };
    out.push(Check::new("search_found_no_factorization", !sb.found, false, detail));
    Ok(out)
}

/// Run the bounded elementary search on `h` and record the bound.
pub fn attach_search(cert: &mut WitnessCertificate, budget: &SearchBudget) -> Result<SearchOutcome, WitnessError> {
    let out = bounded_e2_search(&cert.h, &cert.ring, budget)?;
    cert.search_bound = SearchBound {
        depth: budget.max_depth,
        coeff_height_cap: budget.coeff_height_cap,
        degree_cap: budget.degree_cap,
        words_enumerated: out.stats.words_enumerated,
        found: out.found().is_some(),
    };
    cert.checks = compute_checks(cert)?;
    cert.claim_tier = tier(&cert.checks, cert.primality);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub claim_tier: ClaimTier,
    /// The stored tier agrees with the recomputed one.
    pub tier_matches: bool,
    /// Result of re-running the search, when requested.
    pub search_rerun: Option<SearchBound>,
}

impl VerifyReport {
    pub fn all_required_pass(&self) -> bool {
        self.checks.iter().filter(|c| c.required).all(|c| c.passed)
    }
}

/// Recompute every check (and optionally the search) from the stored data.
pub fn verify_certificate(cert: &WitnessCertificate, rerun_search: bool) -> Result<VerifyReport, WitnessError> {
    let mut checks = compute_checks(cert)?;
    let mut rerun = None;
    if rerun_search && cert.search_bound.depth > 0 {
        let sb = &cert.search_bound;
        let budget = SearchBudget::parametric(sb.depth, sb.coeff_height_cap, sb.degree_cap);
        let out = bounded_e2_search(&cert.h, &cert.ring, &budget)?;
        let bound = SearchBound {
            depth: sb.depth,
            coeff_height_cap: sb.coeff_height_cap,
            degree_cap: sb.degree_cap,
            words_enumerated: out.stats.words_enumerated,
            found: out.found().is_some(),
        };
        checks.push(Check::new("search_rerun_matches", bound == *sb, false, format!("found = {}", bound.found)));
        rerun = Some(bound);
    }
    let claim_tier = tier(&checks, cert.primality);
    Ok(VerifyReport { tier_matches: claim_tier == cert.claim_tier, checks, claim_tier, search_rerun: rerun })
}
