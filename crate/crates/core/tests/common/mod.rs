//! Random inputs shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use sl2gen::ring::{Base, RingElem, RingSpec, Val, Valuation};
use sl2gen::sl2::Mat2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// (name, valuation) for the rings exercised by the property tests.
pub fn local_rings() -> Vec<(&'static str, Valuation)> {
    let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
    let f3u = RingSpec::polynomial(Base::PrimeField(3), &["u"]).unwrap();
    let f5u = RingSpec::polynomial(Base::PrimeField(5), &["u"]).unwrap();
    let zst = RingSpec::polynomial(Base::Integers, &["s", "t"]).unwrap();
    let zx = RingSpec::polynomial(Base::Integers, &["x"]).unwrap();
    let f3xy = RingSpec::polynomial(Base::PrimeField(3), &["x", "y"]).unwrap();
    let u = f5u.var("u");
    vec![
        ("Z, 2", Valuation::new(&z, &z.int(2)).unwrap()),
        ("Z, 5", Valuation::new(&z, &z.int(5)).unwrap()),
        ("F3[u], u", Valuation::new(&f3u, &f3u.var("u")).unwrap()),
        ("F5[u], u^2+2", Valuation::new(&f5u, &(&u * &u + f5u.int(2))).unwrap()),
        ("Z[s,t], t", Valuation::new(&zst, &zst.var("t")).unwrap()),
        ("Z[x], 3", Valuation::new(&zx, &zx.int(3)).unwrap()),
        ("F3[x,y], x", Valuation::new(&f3xy, &f3xy.var("x")).unwrap()),
    ]
}

/// Rings where the amalgam reduction is expected to succeed.
pub fn supported_rings() -> Vec<(&'static str, Valuation)> {
    local_rings()
        .into_iter()
        .filter(|(n, _)| ["Z, 2", "Z, 5", "F3[u], u", "F5[u], u^2+2", "F3[x,y], x"].contains(n))
        .collect()
}

/// A random polynomial with a few small terms.
pub fn poly(spec: &RingSpec, r: &mut ChaCha8Rng, terms: usize, deg: u32, coeff: i64) -> RingElem {
    let n = spec.variables().len();
    let mut acc = spec.zero();
    for _ in 0..r.gen_range(1..=terms) {
        let mut m = spec.int(r.gen_range(-coeff..=coeff));
        for i in 0..n {
            m = m * spec.var_at(i).pow(r.gen_range(0..=deg) as i64);
        }
        acc = acc + m;
    }
    acc
}

pub fn nonzero_poly(spec: &RingSpec, r: &mut ChaCha8Rng, terms: usize, deg: u32, coeff: i64) -> RingElem {
    loop {
        let p = poly(spec, r, terms, deg, coeff);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A random fraction; zero with small probability.
pub fn fraction(spec: &RingSpec, r: &mut ChaCha8Rng) -> RingElem {
    poly(spec, r, 3, 2, 6) / nonzero_poly(spec, r, 2, 2, 4)
}

pub fn nonzero_fraction(spec: &RingSpec, r: &mut ChaCha8Rng) -> RingElem {
    nonzero_poly(spec, r, 3, 2, 6) / nonzero_poly(spec, r, 2, 2, 4)
}

/// A random element of the valuation ring 𝒪.
pub fn integral(v: &Valuation, r: &mut ChaCha8Rng) -> RingElem {
    let e = fraction(v.spec(), r);
    match v.of(&e) {
        Val::Finite(n) if n < 0 => e * v.pi_pow(-n),
        _ => e,
    }
}

/// c·π^k with small c and k.
pub fn capped_param(v: &Valuation, r: &mut ChaCha8Rng) -> RingElem {
    let spec = v.spec();
    let c = loop {
        let c = r.gen_range(-3..=3);
        if !spec.int(c).is_zero() {
            break c;
        }
    };
    spec.int(c) * v.pi_pow(r.gen_range(-2..=1))
}

/// A random product of `len` capped elementary generators of SL₂(R[1/π]).
pub fn capped_word(v: &Valuation, r: &mut ChaCha8Rng, len: usize) -> Mat2 {
    let mut m = Mat2::identity(v.spec());
    for _ in 0..len {
        let p = capped_param(v, r);
        let g = if r.gen_bool(0.5) { Mat2::e12(p) } else { Mat2::e21(p) };
        m = m.mul(&g);
    }
    m
}

/// A random element of SL₂(𝒪) as a product of elementary matrices with
/// integral parameters.
pub fn integral_sl2(v: &Valuation, r: &mut ChaCha8Rng) -> Mat2 {
    let mut m = Mat2::identity(v.spec());
    for _ in 0..r.gen_range(1..=4) {
        let p = integral(v, r);
        let g = if r.gen_bool(0.5) { Mat2::e12(p) } else { Mat2::e21(p) };
        m = m.mul(&g);
    }
    m
}

/// A random element of SL₂(R[1/π]) (general parameters).
pub fn h_sl2(v: &Valuation, r: &mut ChaCha8Rng) -> Mat2 {
    let spec = v.spec();
    let mut m = Mat2::identity(spec);
    for _ in 0..r.gen_range(1..=4) {
        let p = poly(spec, r, 2, 1, 3) * v.pi_pow(r.gen_range(-2..=1));
        let g = if r.gen_bool(0.5) { Mat2::e12(p) } else { Mat2::e21(p) };
        m = m.mul(&g);
    }
    m
}

/// A random element of SL₂(F) (arbitrary fraction parameters).
pub fn field_sl2(spec: &RingSpec, r: &mut ChaCha8Rng) -> Mat2 {
    let mut m = Mat2::identity(spec);
    for _ in 0..r.gen_range(1..=3) {
        let p = fraction(spec, r);
        let g = if r.gen_bool(0.5) { Mat2::e12(p) } else { Mat2::e21(p) };
        m = m.mul(&g);
    }
    m
}
