use num_traits::Signed;

use super::poly::{uni, Poly};
use super::quotient::int_ext_gcd;
use super::{Base, RingElem, RingError, RingSpec};

/// `(d, r, s)` with `r·a + s·b = d` and `(a, b) = (d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bezout {
    pub d: RingElem,
    pub r: RingElem,
    pub s: RingElem,
}

/// Extended gcd over the Euclidean bases ℤ and 𝔽ₚ[u] (also 𝔽ₚ itself).
pub fn gcd_base(a: &RingElem, b: &RingElem) -> Result<Bezout, RingError> {
    let ring = a.ring().clone();
    let b = b
        .embed(&ring)
        .ok_or_else(|| RingError::UnsupportedRing("operands in different rings".into()))?;
    if !a.is_polynomial() || !b.is_polynomial() {
        return Err(RingError::UnsupportedRing("gcd of non-polynomials".into()));
    }
    let lift = |p: Poly| RingElem::from_poly(p);
    match (ring.base, ring.nvars()) {
        (Base::Integers, 0) => {
            let (d, r, s) = int_ext_gcd(&a.as_integer().unwrap(), &b.as_integer().unwrap());
            Ok(Bezout {
                d: lift(Poly::constant(&ring, d)),
                r: lift(Poly::constant(&ring, r)),
                s: lift(Poly::constant(&ring, s)),
            })
        }
        (Base::PrimeField(p), 0 | 1) => {
            if ring.nvars() == 0 {
                let zero = lift(Poly::zero(&ring));
                let one = lift(Poly::one(&ring));
                return Ok(if !a.is_zero() {
                    Bezout { d: one, r: a.inv().unwrap(), s: zero }
                } else if !b.is_zero() {
                    Bezout { d: one, r: zero, s: b.inv().unwrap() }
                } else {
                    Bezout { d: zero.clone(), r: zero.clone(), s: zero }
                });
            }
            let (d, r, s) = uni::ext_gcd_field(a.numer(), b.numer(), 0, p);
            Ok(Bezout { d: lift(d), r: lift(r), s: lift(s) })
        }
        _ => Err(RingError::UnsupportedRing(format!(
            "{ring} is not a supported Euclidean base"
        ))),
    }
}

/// Whether `a` divides `b` in `spec`.
pub fn divides(a: &RingElem, b: &RingElem, spec: &RingSpec) -> bool {
    if a.is_zero() {
        return b.is_zero();
    }
    spec.contains(&(b / a))
}

/// Answer to "is `(x̄, ȳ)` principal in the quotient?".
#[derive(Debug, Clone, PartialEq)]
pub enum PairVerdict {
    Principal(RingElem),
    /// Not principal; the string records the argument.
    NonPrincipal(String),
    Undecided(String),
}

/// Decide principality of `(x, y)` in `quotient`, which must be a field, ℤ,
/// 𝔽ₚ[u] or ℤ[u] (more variables are accepted but mostly undecided).
pub fn pair_principal_in_quotient(
    x: &RingElem,
    y: &RingElem,
    quotient: &RingSpec,
) -> Result<PairVerdict, RingError> {
    if quotient.is_localized() {
        return Err(RingError::UnsupportedQuotient(format!("{quotient}: localized quotient")));
    }
    let embed = |e: &RingElem| {
        e.embed(quotient.ring())
            .filter(|e| e.is_polynomial())
            .ok_or_else(|| RingError::UnsupportedQuotient(format!("{e} is not in {quotient}")))
    };
    let (x, y) = (embed(x)?, embed(y)?);
    if x.is_zero() {
        return Ok(PairVerdict::Principal(y));
    }
    if y.is_zero() || divides(&x, &y, quotient) {
        return Ok(PairVerdict::Principal(x));
    }
    if divides(&y, &x, quotient) {
        return Ok(PairVerdict::Principal(y));
    }
    let nvars = quotient.variables().len();
    match (quotient.base(), nvars) {
        (Base::PrimeField(_), 0 | 1) | (Base::Integers, 0) => {
            return Ok(PairVerdict::Principal(gcd_base(&x, &y)?.d));
        }
        _ => {}
    }
    if quotient.base() != Base::Integers {
        return Ok(PairVerdict::Undecided(format!("no decision procedure over {quotient}")));
    }
    let (c, q) = match (x.as_integer(), y.as_integer()) {
        (Some(c), _) => (c, y.clone()),
        (None, Some(c)) => (c, x.clone()),
        _ => return Ok(PairVerdict::Undecided("neither element is an integer".into())),
    };
    let prime = c.abs().try_into().map(super::is_prime_u64).unwrap_or(false);
    if !prime {
        return Ok(PairVerdict::Undecided(format!("{c} is not a (small) prime")));
    }
    let p = u64::try_from(c.abs()).unwrap();
    let fp = super::PolyRing::new(Base::PrimeField(p), quotient.variables().to_vec());
    let qbar = q.numer().reduce_coefficients(&fp);
    // c ∤ q here, so q̄ ≠ 0
    if qbar.as_constant().is_some() {
        return Ok(PairVerdict::Principal(quotient.one()));
    }
    Ok(PairVerdict::NonPrincipal(format!(
        "a generator g divides the prime {c}, so g = ±1 or g = ±{c}; g = ±{c} fails since {c} does not divide {q}, \
         and g = ±1 fails since ({c}, {q}) maps to ({qbar}) ≠ (1) in {fp}"
    )))
}

/// Output of the transfer of principality along `ux = vy`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    /// Generator `w = s·x + r·y` of `(x, y)`.
    pub w: RingElem,
    /// `x = x_cofactor · w` (this is `v/d`).
    pub x_cofactor: RingElem,
    /// `y = y_cofactor · w` (this is `u/d`).
    pub y_cofactor: RingElem,
}

/// Given `ux = vy` with `yu ≠ 0` and `(u, v) = (d)` via `ru + sv = d`, the
/// ideal `(x, y)` is generated by `sx + ry`.
pub fn lprincipal_transfer(
    u: &RingElem,
    v: &RingElem,
    x: &RingElem,
    y: &RingElem,
    bezout: &Bezout,
) -> Result<Transfer, RingError> {
    let Bezout { d, r, s } = bezout;
    let bad = |m: &str| Err(RingError::HypothesisViolated(m.into()));
    if (y * u).is_zero() {
        return bad("yu = 0");
    }
    if u * x != v * y {
        return bad("ux != vy");
    }
    if r * u + s * v != *d {
        return bad("ru + sv != d");
    }
    let cof = |a: &RingElem| -> Option<RingElem> {
        let q = a.checked_div(d).ok()?;
        q.is_polynomial().then_some(q)
    };
    let (Some(u1), Some(v1)) = (cof(u), cof(v)) else {
        return bad("d does not divide u and v");
    };
    let w = s * x + r * y;
    debug_assert!(&v1 * &w == *x && &u1 * &w == *y);
    Ok(Transfer { w, x_cofactor: v1, y_cofactor: u1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> RingSpec {
        RingSpec::polynomial(Base::Integers, &[]).unwrap()
    }

    #[test]
    fn gcd_examples() {
        let z = z();
        let b = gcd_base(&z.int(4), &z.int(6)).unwrap();
        assert_eq!((b.d, b.r, b.s), (z.int(2), z.int(-1), z.int(1)));
        let b = gcd_base(&z.int(0), &z.int(5)).unwrap();
        assert_eq!((b.d, b.r, b.s), (z.int(5), z.int(0), z.int(1)));
        let zu = RingSpec::polynomial(Base::Integers, &["u"]).unwrap();
        assert!(matches!(gcd_base(&zu.int(2), &zu.var("u")), Err(RingError::UnsupportedRing(_))));
    }

    #[test]
    fn divides_examples() {
        let zst = RingSpec::polynomial(Base::Integers, &["s", "t"]).unwrap();
        let (s, t) = (zst.var("s"), zst.var("t"));
        assert!(divides(&t, &(&s * &t * &t + &t * &t * &t), &zst));
        assert!(!divides(&s, &t, &zst));
        let loc = zst.localize(vec![s.clone()]).unwrap();
        assert!(divides(&s, &t, &loc));
    }

    #[test]
    fn pair_examples() {
        let zu = RingSpec::polynomial(Base::Integers, &["u"]).unwrap();
        let u = zu.var("u");
        assert!(matches!(
            pair_principal_in_quotient(&zu.int(2), &u, &zu).unwrap(),
            PairVerdict::NonPrincipal(_)
        ));
        assert_eq!(
            pair_principal_in_quotient(&zu.int(2), &zu.int(3), &zu).unwrap(),
            PairVerdict::Principal(zu.one())
        );
        assert_eq!(
            pair_principal_in_quotient(&zu.int(2), &(zu.int(4) + zu.int(2) * &u), &zu).unwrap(),
            PairVerdict::Principal(zu.int(2))
        );
        assert_eq!(
            pair_principal_in_quotient(&zu.int(3), &(zu.int(3) * &u + zu.int(1)), &zu).unwrap(),
            PairVerdict::Principal(zu.one())
        );
        assert!(matches!(
            pair_principal_in_quotient(&zu.int(3), &(&u * &u + zu.one()), &zu).unwrap(),
            PairVerdict::NonPrincipal(_)
        ));
    }

    #[test]
    fn transfer_examples() {
        let z = z();
        let bz = |d, r, s| Bezout { d: z.int(d), r: z.int(r), s: z.int(s) };
        let t = lprincipal_transfer(&z.int(4), &z.int(6), &z.int(3), &z.int(2), &bz(2, -1, 1)).unwrap();
        assert_eq!(t.w, z.int(1));
        let t = lprincipal_transfer(&z.int(2), &z.int(2), &z.int(5), &z.int(5), &bz(2, 1, 0)).unwrap();
        assert_eq!(t.w, z.int(5));
        assert!(matches!(
            lprincipal_transfer(&z.int(0), &z.int(2), &z.int(5), &z.int(0), &bz(2, 0, 1)),
            Err(RingError::HypothesisViolated(_))
        ));
    }
}
