//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::*;
use sl2gen::amalgam::{amalgam_reduce, classify_side, coset_reduce, normal_form_check, AmalgamError, Side, SideClass};
use sl2gen::expr::parse_matrix;
use sl2gen::ring::{divides, gcd_base, lprincipal_transfer, pair_principal_in_quotient, Base, PairVerdict, RingElem, RingSpec, Valuation};
use sl2gen::search::{bounded_e2_search, SearchBudget, SearchVerdict};
use sl2gen::sl2::{e2_generating_set, whirl_identity, word_eval, GenWord, Mat2, Token};
use sl2gen::tree::{act, base_edge, base_vertex, distance, neighbors, stabilizes, TreeVertex};
use sl2gen::witness::{attach_search, laurent_witness, mainstep_ambient, mainstep_witness, verify_certificate, ClaimTier, WitnessCertificate};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn d(r: &RingElem) -> Mat2 {
    Mat2::diag(r.inv().unwrap(), r.clone()).unwrap()
}

fn c1_whirl() -> Outcome {
    let zr = RingSpec::polynomial(Base::Integers, &["r"]).unwrap();
    let r = zr.var("r");
    ensure(word_eval(&whirl_identity(&r).unwrap(), &[], &zr).unwrap() == d(&r), || "symbolic identity fails".into())?;
    let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
    let mut g = rng(1);
    for _ in 0..1000 {
        let x = nonzero_fraction(&z, &mut g);
        let got = word_eval(&whirl_identity(&x).unwrap(), &[], &z).unwrap();
        ensure(got == d(&x), || format!("r = {x}"))?;
    }
    Ok("symbolic + 1000 numeric".into())
}

fn c2_conjugation() -> Outcome {
    let mut g = rng(2);
    for (name, v) in local_rings() {
        let spec = v.spec();
        for _ in 0..100 {
            let rr = nonzero_fraction(spec, &mut g);
            let x = fraction(spec, &mut g);
            let dm = d(&rr);
            for n in -3i64..=3 {
                let (dn, dni) = (dm.pow(n).unwrap(), dm.pow(-n).unwrap());
                let scale = rr.pow(-2 * n);
                ensure(dn.mul(&Mat2::e12(x.clone())).mul(&dni) == Mat2::e12(&scale * &x), || format!("{name}: E12, n={n}"))?;
                ensure(dni.mul(&Mat2::e21(x.clone())).mul(&dn) == Mat2::e21(&scale * &x), || format!("{name}: E21, n={n}"))?;
            }
        }
    }
    Ok(format!("{} rings x 100 x 7 exponents", local_rings().len()))
}

fn amalgam_rings() -> Vec<(&'static str, Valuation)> {
    let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
    let f3 = RingSpec::polynomial(Base::PrimeField(3), &["u"]).unwrap();
    vec![
        ("Z[1/2]", Valuation::new(&z, &z.int(2)).unwrap()),
        ("Z[1/5]", Valuation::new(&z, &z.int(5)).unwrap()),
        ("F3[u][1/u]", Valuation::new(&f3, &f3.var("u")).unwrap()),
    ]
}

fn c3_amalgam() -> Outcome {
    let mut g = rng(3);
    let mut times = Vec::new();
    for (name, v) in amalgam_rings() {
        let start = Instant::now();
        let rspec = v.spec().polynomial_ring();
        let dpi = Mat2::diag(v.pi().clone(), v.spec().one()).unwrap();
        let dinv = Mat2::diag(v.pi_pow(-1), v.spec().one()).unwrap();
        for _ in 0..200 {
            let len = g.gen_range(0..=8);
            let h = capped_word(&v, &mut g, len);
            let w = amalgam_reduce(&h, &v).map_err(|e| format!("{name}: {e} on {h}"))?;
            ensure(w.product() == h, || format!("{name}: product mismatch for {h}"))?;
            ensure(normal_form_check(&w), || format!("{name}: not a normal form for {h}"))?;
            for (side, f) in &w.factors {
                let m = match side {
                    Side::A => f.clone(),
                    Side::B => dpi.mul(f).mul(&dinv),
                };
                ensure(m.in_sl2_of(&rspec), || format!("{name}: {side} factor {f}"))?;
            }
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 60.0, || format!("{name} took {secs:.1}s"))?;
        times.push(format!("{name} {secs:.2}s"));
    }
    Ok(times.join(", "))
}

fn c4_coset() -> Outcome {
    let mut g = rng(4);
    let rings = supported_rings();
    for (name, v) in &rings {
        for _ in 0..100 {
            let a = integral_sl2(v, &mut g);
            let h = coset_reduce(&a, v).map_err(|e| format!("{name}: {e} on {a}"))?;
            ensure(h.in_sl2_of(&v.spec().polynomial_ring()), || format!("{name}: h = {h}"))?;
            ensure(v.of(&h.mul(&a).a21).at_least(1), || format!("{name}: (ha)21 for a = {a}"))?;
        }
    }
    Ok(format!("{} rings x 100", rings.len()))
}

fn laurent_cert() -> WitnessCertificate {
    let zx = RingSpec::polynomial(Base::Integers, &["x"]).unwrap();
    laurent_witness(&zx, &zx.int(2), &zx.var("x")).unwrap()
}

fn mainstep_cert() -> WitnessCertificate {
    let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
    let amb = mainstep_ambient(&z).unwrap();
    let f = amb.one() + amb.var("s") * amb.var("t");
    mainstep_witness(&z, &f, &amb.int(2), false).unwrap()
}

fn tier_ok(cert: &WitnessCertificate) -> Result<(), String> {
    let failing: Vec<_> = cert.checks.iter().filter(|c| c.required && !c.passed).map(|c| c.name.as_str()).collect();
    ensure(failing.is_empty(), || format!("failing checks: {failing:?}"))?;
    ensure(cert.claim_tier == ClaimTier::TheoremBacked, || "tier is not TheoremBacked".into())?;
    let report = verify_certificate(cert, false).map_err(|e| e.to_string())?;
    ensure(report.all_required_pass() && report.tier_matches, || "re-verification disagrees".into())
}

fn c5_laurent() -> Outcome {
    let zxt = RingSpec::polynomial(Base::Integers, &["x", "t"]).unwrap();
    let zx = RingSpec::polynomial(Base::Integers, &["x"]).unwrap();
    let verdict = pair_principal_in_quotient(&zx.int(2), &zx.var("x"), &zx).map_err(|e| e.to_string())?;
    ensure(matches!(verdict, PairVerdict::NonPrincipal(_)), || format!("pair verdict {verdict:?}"))?;
    let v = Valuation::new(&zxt, &zxt.var("t")).unwrap();
    let a = Mat2::e21(zxt.int(2) / zxt.var("x"));
    ensure(matches!(coset_reduce(&a, &v), Err(AmalgamError::NonPrincipal(_))), || "coset_reduce did not report the obstruction".into())?;
    let cert = laurent_cert();
    let want = parse_matrix("[[1-2*x/t, x^2/t], [-4/t, 1+2*x/t]]", &cert.ambient).map_err(|e| e.to_string())?;
    ensure(cert.h == want, || format!("h = {}", cert.h))?;
    tier_ok(&cert)?;
    Ok(format!("h = {}", cert.h))
}

fn c6_mainstep() -> Outcome {
    let cert = mainstep_cert();
    let want = parse_matrix("[[1-2*(1-s)/t, 4/t], [-(1-s)^2/t, 1+2*(1-s)/t]]", &cert.ambient).map_err(|e| e.to_string())?;
    ensure(cert.h == want, || format!("h = {}", cert.h))?;
    ensure(cert.h.det().is_one(), || "det != 1".into())?;
    let s_ring = &cert.ring;
    let v = Valuation::new(s_ring, &s_ring.var("t")).map_err(|e| e.to_string())?;
    let class = classify_side(&cert.b, &v).map_err(|e| e.to_string())?.class;
    ensure(class == SideClass::InBOnly, || format!("b classified {class:?}"))?;
    for name in ["entries_only_s_and_inv_t", "p_prime", "p_does_not_divide_f0"] {
        let c = cert.check(name).ok_or_else(|| format!("missing check {name}"))?;
        ensure(c.passed, || format!("{name}: {}", c.detail))?;
    }
    tier_ok(&cert)?;
    Ok(format!("h = {}", cert.h))
}

/// A random menu parameter `c·μ` with `|c| ≤ 16` and small exponents.
fn monomial_param(s: &RingSpec, g: &mut ChaCha8Rng) -> RingElem {
    let c = loop {
        let c = g.gen_range(-16i64..=16);
        if c != 0 {
            break c;
        }
    };
    let mut m = s.int(c);
    for i in 0..s.variables().len() {
        let y = s.var_at(i);
        let lo = if s.contains(&(s.one() / &y)) { -2 } else { 0 };
        m = m * y.pow(g.gen_range(lo..=2));
    }
    m
}

fn planted_word(s: &RingSpec, g: &mut ChaCha8Rng, len: usize) -> GenWord {
    let upper = g.gen_bool(0.5);
    GenWord::new(
        (0..len)
            .map(|i| {
                let p = monomial_param(s, g);
                if (i % 2 == 0) == upper { Token::E12(p) } else { Token::E21(p) }
            })
            .collect(),
    )
}

fn c7_search() -> Outcome {
    let budget = |d| SearchBudget { ceiling: Some(u128::MAX), ..SearchBudget::parametric(d, 16, 8) };
    let mut notes = Vec::new();
    let (laurent, mainstep) = (laurent_cert(), mainstep_cert());
    for mut cert in [laurent.clone(), mainstep.clone()] {
        let out = attach_search(&mut cert, &budget(4)).map_err(|e| e.to_string())?;
        ensure(out.verdict == SearchVerdict::NotFoundAtBound, || format!("{}: factorization found", cert.kind.name()))?;
        ensure(cert.claim_tier == ClaimTier::TheoremBacked, || "tier changed after search".into())?;
        notes.push(format!("{} not found ({} words)", cert.kind.name(), out.stats.words_enumerated));
    }
    let mut g = rng(7);
    let mut exact = 0;
    for i in 0..50 {
        let len = i / 10 + 1;
        let s = if len == 5 { &laurent.ring } else { &mainstep.ring };
        let w = planted_word(s, &mut g, len);
        let target = word_eval(&w, &[], s).unwrap();
        let out = bounded_e2_search(&target, s, &budget(len)).map_err(|e| e.to_string())?;
        let found = out.found().ok_or_else(|| format!("planted word {i} of length {len} not found"))?;
        ensure(found.len() <= len && out.stats.depth == found.len(), || format!("planted word {i}: depth {}", found.len()))?;
        ensure(word_eval(found, &out.table, s).unwrap() == target, || format!("planted word {i}: wrong product"))?;
        exact += usize::from(found.len() == len);
    }
    notes.push(format!("50/50 planted found, {exact} at the planted length"));
    Ok(notes.join("; "))
}

fn c8_tree() -> Outcome {
    let mut g = rng(8);
    let rings = local_rings();
    for i in 0..1000 {
        let (name, v) = &rings[i % rings.len()];
        let vert = |g: &mut ChaCha8Rng| {
            let k = g.gen_range(-2..=2);
            let dk = Mat2::diag(v.pi_pow(k), v.spec().one()).unwrap();
            act(&field_sl2(v.spec(), g).mul(&dk), &base_vertex(v), v).unwrap()
        };
        let (w1, w2) = (vert(&mut g), vert(&mut g));
        let (a, b) = (field_sl2(v.spec(), &mut g), field_sl2(v.spec(), &mut g));
        let (a1, a2) = (act(&a, &w1, v).unwrap(), act(&a, &w2, v).unwrap());
        ensure(distance(&a1, &a2, v) == distance(&w1, &w2, v), || format!("{name}: isometry"))?;
        let lhs = act(&a.mul(&b), &w1, v).unwrap();
        ensure(lhs.equals(&act(&a, &act(&b, &w1, v).unwrap(), v).unwrap(), v), || format!("{name}: homomorphism"))?;
        let st = if i % 2 == 0 {
            let m = w1.basis(v);
            m.mul(&integral_sl2(v, &mut g)).mul(&m.inv_general().unwrap())
        } else {
            a.clone()
        };
        ensure(stabilizes(&st, &w1, v).unwrap() == act(&st, &w1, v).unwrap().equals(&w1, v), || format!("{name}: stabilizer"))?;
        let e = base_edge(v);
        let h = h_sl2(v, &mut g);
        let (hx, hy) = (act(&h, &e.a, v).unwrap(), act(&h, &e.b, v).unwrap());
        ensure(hx.parity() == 0 && hy.parity() == 1, || format!("{name}: edge orbits"))?;
    }
    let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
    let f3 = RingSpec::polynomial(Base::PrimeField(3), &["u"]).unwrap();
    let v2 = Valuation::new(&z, &z.int(2)).unwrap();
    let vu = Valuation::new(&f3, &f3.var("u")).unwrap();
    for (v, want) in [(&v2, 3), (&vu, 4)] {
        let n = neighbors(&base_vertex(v), v, 0).vertices.len();
        ensure(n == want, || format!("{} neighbors over {}", n, v.spec()))?;
        let x0 = base_vertex(v);
        let target = act(&Mat2::diag(v.pi_pow(-2), v.spec().one()).unwrap(), &x0, v).unwrap();
        let formula = distance(&x0, &target, v);
        let bfs = bfs_distance(v, &x0, &target, 4).ok_or("target not reached by BFS")?;
        ensure(formula == 2 && bfs == 2, || format!("formula {formula}, BFS {bfs}"))?;
    }
    Ok("1000 random cases, BFS distance 2".into())
}

fn bfs_distance(v: &Valuation, from: &TreeVertex, to: &TreeVertex, radius: u64) -> Option<u64> {
    let mut seen = vec![from.clone()];
    let mut frontier = vec![from.clone()];
    for level in 0..=radius {
        if frontier.iter().any(|w| w.equals(to, v)) {
            return Some(level);
        }
        let mut next = Vec::new();
        for w in &frontier {
            for z in neighbors(w, v, 0).vertices {
                if !seen.iter().any(|x| x.equals(&z, v)) {
                    seen.push(z.clone());
                    next.push(z);
                }
            }
        }
        frontier = next;
    }
    None
}

fn c9_transfer() -> Outcome {
    let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
    let mut g = rng(9);
    for _ in 0..500 {
        let u = loop {
            let u = g.gen_range(-1000i64..=1000);
            if u != 0 {
                break u;
            }
        };
        let vv = g.gen_range(-1000i64..=1000);
        let k = loop {
            let k = g.gen_range(-1000i64..=1000);
            if k != 0 {
                break k;
            }
        };
        let gg = BigInt::from(u).gcd(&BigInt::from(vv));
        let (xb, yb) = (BigInt::from(vv) / &gg * k, BigInt::from(u) / &gg * k);
        let (x, y) = (z.integer(xb.clone()), z.integer(yb.clone()));
        let (ue, ve) = (z.int(u), z.int(vv));
        ensure(&ue * &x == &ve * &y, || "bad tuple".into())?;
        let bez = gcd_base(&ue, &ve).map_err(|e| e.to_string())?;
        let t = lprincipal_transfer(&ue, &ve, &x, &y, &bez).map_err(|e| e.to_string())?;
        ensure(divides(&t.w, &x, &z) && divides(&t.w, &y, &z), || format!("{} does not divide ({x}, {y})", t.w))?;
        ensure(t.w == &bez.s * &x + &bez.r * &y, || "generator not in (x, y)".into())?;
        ensure(t.w.as_integer().unwrap().abs() == xb.gcd(&yb), || format!("gcd oracle disagrees for ({x}, {y})"))?;
    }
    Ok("500 tuples".into())
}

fn c10_generating_set() -> Outcome {
    let names = ["y1", "y2", "y3"];
    let mut g = rng(10);
    let mut refound = 0;
    for m in 0..=3usize {
        let base = RingSpec::polynomial(Base::Integers, &names[..m]).unwrap();
        let s = base.localize((0..m).map(|i| base.var_at(i)).collect()).unwrap();
        let gens = e2_generating_set(&s).map_err(|e| e.to_string())?;
        ensure(gens.len() == m + 2 * (1 << m), || format!("m = {m}: {} generators", gens.len()))?;
        ensure(gens.iter().all(|x| x.in_sl2_of(&s)), || format!("m = {m}: generator outside SL2"))?;
        for _ in 0..20 {
            let len = g.gen_range(0..=4);
            let mut target = Mat2::identity(&s);
            for _ in 0..len {
                let x = &gens[g.gen_range(0..gens.len())];
                target = target.mul(&if g.gen_bool(0.5) { x.clone() } else { x.inv().unwrap() });
            }
            let out = bounded_e2_search(&target, &s, &SearchBudget::finite(4, gens.clone())).map_err(|e| e.to_string())?;
            let w = out.found().ok_or_else(|| format!("m = {m}: product of length {len} not re-found"))?;
            ensure(w.len() <= len, || format!("m = {m}: found length {} > {len}", w.len()))?;
            ensure(word_eval(w, &out.table, &s).unwrap() == target, || "wrong product".into())?;
            refound += 1;
        }
    }
    Ok(format!("sizes 2, 5, 10, 19; {refound}/80 products re-found"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("whirl identity", c1_whirl),
        ("conjugation laws", c2_conjugation),
        ("amalgam round trip", c3_amalgam),
        ("coset_reduce contract", c4_coset),
        ("Laurent obstruction witness", c5_laurent),
        ("main-step certificate", c6_mainstep),
        ("bounded-search corroboration", c7_search),
        ("tree invariants", c8_tree),
        ("principal transfer", c9_transfer),
        ("generating set", c10_generating_set),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(note) => println!("PASS {:>2} {name} ({secs:.2}s): {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), total.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
