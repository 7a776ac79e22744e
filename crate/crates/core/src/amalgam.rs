//! `SL₂(F) = A *_U B` for a discrete valuation: side classification, coset
//! reduction into `U` and normal forms for `SL₂(R[1/π])`.

use std::fmt;

use thiserror::Error;

use crate::ring::{pair_principal_in_quotient, PairVerdict, QuotientRing, RingElem, RingError, RingSpec, Val, Valuation};
use crate::sl2::Mat2;
use crate::tree::{act, base_edge, distance, geodesic, TreeVertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmalgamError {
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("matrix does not lie in A = SL2(O)")]
    NotInA,
    #[error("matrix does not lie in B")]
    NotInB,
    #[error("matrix does not lie in SL2(R[1/pi])")]
    NotInH,
    #[error("unsupported quotient: {0}")]
    UnsupportedQuotient(String),
    #[error("ideal is not principal in the residue ring: {0}")]
    NonPrincipal(String),
    #[error("reduction stuck: {0}")]
    ReductionStuck(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SideClass {
    InU,
    InAOnly,
    InBOnly,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidePattern {
    pub class: SideClass,
    /// Valuations of `a11, a12, a21, a22`.
    pub valuations: [Val; 4],
}

impl SidePattern {
    pub fn in_a(&self) -> bool {
        matches!(self.class, SideClass::InU | SideClass::InAOnly)
    }

    pub fn in_b(&self) -> bool {
        matches!(self.class, SideClass::InU | SideClass::InBOnly)
    }
}

pub fn classify_side(g: &Mat2, v: &Valuation) -> Result<SidePattern, AmalgamError> {
    if !g.is_sl2() {
        return Err(AmalgamError::NotUnimodular);
    }
    let vals = g.entries().map(|e| v.of(e));
    let [v11, v12, v21, v22] = vals;
    let z = Val::Finite(0);
    let in_a = vals.iter().all(|&x| x >= z);
    let in_b = v11 >= z && v12 >= Val::Finite(-1) && v21 >= Val::Finite(1) && v22 >= z;
    let class = match (in_a, in_b) {
        (true, true) => SideClass::InU,
        (true, false) => SideClass::InAOnly,
        (false, true) => SideClass::InBOnly,
        (false, false) => SideClass::Neither,
    };
    Ok(SidePattern { class, valuations: vals })
}

/// `D(π, 1)`.
fn d_pi(v: &Valuation) -> Mat2 {
    Mat2::diag(v.pi().clone(), v.pi().one_like()).unwrap()
}

/// `D(1/π, 1)`.
fn d_pi_inv(v: &Valuation) -> Mat2 {
    Mat2::diag(v.pi_pow(-1), v.pi().one_like()).unwrap()
}

/// `D(1/π,1)·m·D(π,1)`.
pub fn to_b_side(m: &Mat2, v: &Valuation) -> Mat2 {
    d_pi_inv(v).mul(m).mul(&d_pi(v))
}

/// `D(π,1)·m·D(1/π,1)`, inverse of [`to_b_side`].
pub fn from_b_side(m: &Mat2, v: &Valuation) -> Mat2 {
    d_pi(v).mul(m).mul(&d_pi_inv(v))
}

fn ring_of(v: &Valuation) -> Result<RingSpec, AmalgamError> {
    if v.spec().is_localized() {
        return Err(AmalgamError::UnsupportedQuotient(format!(
            "{}: R must be a polynomial ring",
            v.spec()
        )));
    }
    Ok(v.spec().clone())
}

/// Bezout data for `(p̄, q̄)` in the residue ring.  Falls back to a
/// divisibility check, and reports non-principal pairs explicitly.
fn residue_bezout(
    q: &QuotientRing,
    p: &RingElem,
    r: &RingElem,
) -> Result<(RingElem, RingElem, RingElem), AmalgamError> {
    match q.ext_gcd(p, r) {
        Ok(b) => return Ok(b),
        Err(RingError::UnsupportedQuotient(_)) => {}
        Err(e) => return Err(e.into()),
    }
    let spec = q.value_spec();
    let (zero, one) = (spec.zero(), spec.one());
    if p.is_zero() {
        return Ok((r.clone(), zero, one));
    }
    if r.is_zero() || q.div_exact(r, p).is_some() {
        return Ok((p.clone(), one, zero));
    }
    if q.div_exact(p, r).is_some() {
        return Ok((r.clone(), zero, one));
    }
    let free = match q {
        QuotientRing::SubstituteZero { spec, var } => {
            let vars: Vec<String> = spec
                .variables()
                .iter()
                .enumerate()
                .filter(|(i, _)| i != var)
                .map(|(_, n)| n.clone())
                .collect();
            RingSpec::new(spec.base(), vars, Vec::new())?
        }
        _ => spec.clone(),
    };
    match pair_principal_in_quotient(p, r, &free)? {
        PairVerdict::NonPrincipal(tag) => Err(AmalgamError::NonPrincipal(format!("({p}, {r}) in {free}: {tag}"))),
        PairVerdict::Principal(g) => Err(AmalgamError::UnsupportedQuotient(format!(
            "({p}, {r}) = ({g}) in {free}, but no Bezout coefficients are available"
        ))),
        PairVerdict::Undecided(why) => Err(AmalgamError::UnsupportedQuotient(format!("{q}: {why}"))),
    }
}

/// Preimage in `SL₂(R)` of `k̄ ∈ SL₂(R/πR)`.
fn lift_sl2(k: &Mat2, q: &QuotientRing, spec: &RingSpec) -> Result<Mat2, AmalgamError> {
    if let QuotientRing::SubstituteZero { .. } = q {
        return Ok(k.clone());
    }
    if !q.is_field() {
        return Err(AmalgamError::UnsupportedQuotient(format!("no lift SL2({q}) -> SL2(R)")));
    }
    let one = spec.one();
    let lift_e12 = |x: RingElem| Mat2::e12(q.lift(&x));
    // k = E12((a-1)/c) E21(c) E12((d-1)/c) when c != 0
    let decompose = |a: &RingElem, c: &RingElem, d: &RingElem| -> Mat2 {
        let ci = q.inverse(c).expect("nonzero residue");
        let vone = a.one_like();
        lift_e12(q.canon(&((a - &vone) * &ci)))
            .mul(&Mat2::e21(q.lift(c)))
            .mul(&lift_e12(q.canon(&((d - &vone) * &ci))))
    };
    if !k.a21.is_zero() {
        return Ok(decompose(&k.a11, &k.a21, &k.a22));
    }
    // E21(1)·k has (2,1)-entry a ≠ 0
    let c = q.canon(&(&k.a11 + &k.a21));
    let d = q.canon(&(&k.a12 + &k.a22));
    Ok(Mat2::e21(-&one).mul(&decompose(&k.a11, &c, &d)))
}

/// `h = [[*, *], [r, s]] ∈ SL₂(R)` with `r·α + s·β ∈ 𝒫`, for `α, β ∈ 𝒪`
/// generating 𝒪.
fn killing_row(alpha: &RingElem, beta: &RingElem, v: &Valuation) -> Result<Mat2, AmalgamError> {
    let spec = ring_of(v)?;
    let q = QuotientRing::of(v).map_err(|e| AmalgamError::UnsupportedQuotient(e.to_string()))?;
    let (_, za) = v.integral_fraction(alpha);
    let (_, zb) = v.integral_fraction(beta);
    let z = RingElem::from_poly(za.mul(&zb));
    let p = &z * alpha;
    let r = &z * beta;
    let pb = q.reduce(v, &p)?.value;
    let rb = q.reduce(v, &r)?.value;
    let (delta, c1, c2) = residue_bezout(&q, &pb, &rb)?;
    if delta.is_zero() {
        return Err(AmalgamError::NotUnimodular);
    }
    let lam = q
        .div_exact(&rb, &delta)
        .ok_or_else(|| AmalgamError::UnsupportedQuotient("gcd does not divide".into()))?;
    let mu = -q
        .div_exact(&pb, &delta)
        .ok_or_else(|| AmalgamError::UnsupportedQuotient("gcd does not divide".into()))?;
    let kbar = Mat2::new(-&c1, -&c2, lam, mu);
    if !kbar.det().is_one() && q.canon(&kbar.det()) != q.value_spec().one() {
        return Err(AmalgamError::ReductionStuck(format!("completion {kbar} is not unimodular")));
    }
    lift_sl2(&kbar, &q, &spec)
}

/// `h ∈ SL₂(R)` with `h·a ∈ U`.
pub fn coset_reduce(a: &Mat2, v: &Valuation) -> Result<Mat2, AmalgamError> {
    let pat = classify_side(a, v)?;
    if !pat.in_a() {
        return Err(AmalgamError::NotInA);
    }
    let spec = ring_of(v)?;
    if pat.class == SideClass::InU {
        return Ok(Mat2::identity(&spec));
    }
    let h = killing_row(&a.a11, &a.a21, v)?;
    check_reduced(&h, a, &spec, v)?;
    Ok(h)
}

/// `h ∈ D(1/π,1)·SL₂(R)·D(π,1)` with `h·b ∈ U`.
pub fn coset_reduce_b(b: &Mat2, v: &Valuation) -> Result<Mat2, AmalgamError> {
    let pat = classify_side(b, v)?;
    if !pat.in_b() {
        return Err(AmalgamError::NotInB);
    }
    let spec = ring_of(v)?;
    if pat.class == SideClass::InU {
        return Ok(Mat2::identity(&spec));
    }
    let bp = from_b_side(b, v);
    let h0 = killing_row(&bp.a12, &bp.a22, v)?;
    let hp = Mat2::weyl(&spec).mul(&h0);
    let h = to_b_side(&hp, v);
    if !hp.in_sl2_of(&spec) || classify_side(&h.mul(b), v)?.class != SideClass::InU {
        return Err(AmalgamError::ReductionStuck(format!("B-side reduction of {b} failed")));
    }
    Ok(h)
}

fn check_reduced(h: &Mat2, a: &Mat2, spec: &RingSpec, v: &Valuation) -> Result<(), AmalgamError> {
    if !h.in_sl2_of(spec) || classify_side(&h.mul(a), v)?.class != SideClass::InU {
        return Err(AmalgamError::ReductionStuck(format!("A-side reduction of {a} failed")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Side::A { "A" } else { "B" })
    }
}

/// `factors[0] ⋯ factors[k-1] · trailing`.
#[derive(Debug, Clone)]
pub struct AmalgamWord {
    pub factors: Vec<(Side, Mat2)>,
    pub trailing: Mat2,
    pub valuation: Valuation,
}

impl AmalgamWord {
    pub fn product(&self) -> Mat2 {
        self.factors
            .iter()
            .fold(Mat2::identity(self.valuation.spec()), |acc, (_, m)| acc.mul(m))
            .mul(&self.trailing)
    }
}

fn in_h(m: &Mat2, v: &Valuation) -> bool {
    let h = v.spec().localize(vec![v.pi().clone()]).expect("pi is nonzero");
    m.in_sl2_of(&h)
}

/// Normal form of `h ∈ SL₂(R[1/π])` by folding the geodesic from the base
/// edge to `h·e`.
pub fn amalgam_reduce(h: &Mat2, v: &Valuation) -> Result<AmalgamWord, AmalgamError> {
    if !h.is_sl2() {
        return Err(AmalgamError::NotUnimodular);
    }
    ring_of(v)?;
    if !in_h(h, v) {
        return Err(AmalgamError::NotInH);
    }
    let e = base_edge(v);
    let (x, y) = (e.a.clone(), e.b.clone());
    let mut c = h.clone();
    let mut factors = Vec::new();
    loop {
        let (cx, cy) = (act(&c, &x, v).unwrap(), act(&c, &y, v).unwrap());
        let (z0, zn, n) = [(&x, &cx), (&x, &cy), (&y, &cx), (&y, &cy)]
            .into_iter()
            .map(|(a, b)| (a.clone(), b.clone(), distance(a, b, v)))
            .max_by_key(|t| t.2)
            .unwrap();
        if n <= 1 {
            break;
        }
        let path = geodesic(&z0, &zn, v);
        let (z1, z2) = (&path[1], &path[2]);
        let stuck = |m: String| AmalgamError::ReductionStuck(m);
        let (side, g) = if z1.equals(&x, v) {
            let a = toward_neighbor_of_x0(z2, v);
            (Side::A, coset_reduce(&a, v).map_err(|e| stuck(e.to_string()))?)
        } else if z1.equals(&y, v) {
            let z2p = act(&d_pi(v), z2, v).unwrap();
            if z2p.n != 1 {
                return Err(stuck(format!("unexpected neighbor {z2} of y")));
            }
            // E21(r)·w carries D(π,1)·x = (−1, 0) to z2' = (1, r)
            let app = Mat2::e21(z2p.u.clone()).mul(&Mat2::weyl(v.spec()));
            let b = to_b_side(&app, v);
            (Side::B, coset_reduce_b(&b, v).map_err(|e| stuck(e.to_string()))?)
        } else {
            return Err(stuck(format!("geodesic leaves the base edge at {z1}")));
        };
        let before = n;
        c = g.mul(&c);
        let gi = g.inv().map_err(|_| AmalgamError::NotUnimodular)?;
        factors.push((side, gi));
        let after = [&x, &y]
            .iter()
            .flat_map(|a| [&x, &y].map(|b| distance(a, &act(&c, b, v).unwrap(), v)))
            .max()
            .unwrap();
        if after >= before {
            return Err(stuck("fold did not shorten the geodesic".into()));
        }
    }
    // c fixes x and y, so c ∈ U ∩ H
    Ok(AmalgamWord { factors, trailing: c, valuation: v.clone() })
}

/// An element of `A` carrying `y = (1, 0)` to the neighbor `z` of `x₀`:
/// `E₂₁(u)` for `z = (1, u)`, and `w` for `z = (−1, 0)`.
fn toward_neighbor_of_x0(z: &TreeVertex, v: &Valuation) -> Mat2 {
    if z.n == 1 {
        Mat2::e21(z.u.clone())
    } else {
        Mat2::weyl(v.spec())
    }
}

/// Alternating sides, each factor on its claimed side but outside `U`.
pub fn normal_form_check(w: &AmalgamWord) -> bool {
    let v = &w.valuation;
    let sides_alternate = w.factors.windows(2).all(|p| p[0].0 != p[1].0);
    let placed = w.factors.iter().all(|(side, m)| match classify_side(m, v) {
        Ok(p) => match side {
            Side::A => p.class == SideClass::InAOnly,
            Side::B => p.class == SideClass::InBOnly,
        },
        Err(_) => false,
    });
    let trailing_in_u = classify_side(&w.trailing, v).map(|p| p.class == SideClass::InU).unwrap_or(false);
    sides_alternate && placed && trailing_in_u
}

/// Factors live where claimed: A-side in `SL₂(R)`, B-side conjugate back
/// into `SL₂(R)`, trailing factor in `SL₂([[R, R], [πR, R]])`.
pub fn factors_in_h(w: &AmalgamWord) -> bool {
    let v = &w.valuation;
    let spec = v.spec();
    let sides = w.factors.iter().all(|(side, m)| match side {
        Side::A => m.in_sl2_of(spec),
        Side::B => from_b_side(m, v).in_sl2_of(spec),
    });
    let t = &w.trailing;
    sides && t.in_sl2_of(spec) && spec.contains(&(&t.a21 / v.pi()))
}
