mod common;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use sl2gen::ring::{Base, RingSpec, Valuation};
use sl2gen::sl2::Mat2;
use sl2gen::tree::{act, base_edge, base_vertex, distance, geodesic, neighbors, stabilizes, TreeVertex};

fn random_vertex(v: &Valuation, r: &mut rand_chacha::ChaCha8Rng) -> TreeVertex {
    let g = field_sl2(v.spec(), r);
    let k = r.gen_range(-2..=2);
    let d = Mat2::diag(v.pi_pow(k), v.spec().one()).unwrap();
    act(&g.mul(&d), &base_vertex(v), v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn isometry_and_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rings = local_rings();
        let (name, v) = &rings[r.gen_range(0..rings.len())];
        let g = field_sl2(v.spec(), &mut r);
        let h = field_sl2(v.spec(), &mut r);
        let (w1, w2) = (random_vertex(v, &mut r), random_vertex(v, &mut r));
        let (g1, g2) = (act(&g, &w1, v).unwrap(), act(&g, &w2, v).unwrap());
        prop_assert_eq!(distance(&g1, &g2, v), distance(&w1, &w2, v), "{}", name);
        let lhs = act(&g.mul(&h), &w1, v).unwrap();
        let rhs = act(&g, &act(&h, &w1, v).unwrap(), v).unwrap();
        prop_assert!(lhs.equals(&rhs, v), "{}: {} vs {}", name, lhs, rhs);
        prop_assert_eq!(g1.parity(), w1.parity());
    }

    #[test]
    fn stabilizer_consistency(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rings = local_rings();
        let (name, v) = &rings[r.gen_range(0..rings.len())];
        let w = random_vertex(v, &mut r);
        let g = if r.gen_bool(0.5) {
            // a conjugate of SL2(O) fixes w
            let b = w.basis(v);
            b.mul(&integral_sl2(v, &mut r)).mul(&b.inv_general().unwrap())
        } else {
            field_sl2(v.spec(), &mut r)
        };
        let fixed = act(&g, &w, v).unwrap().equals(&w, v);
        prop_assert_eq!(stabilizes(&g, &w, v).unwrap(), fixed, "{}", name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn edge_orbits_are_not_swapped(seed in any::<u64>()) {
        let mut r = rng(seed);
        for (name, v) in local_rings() {
            let g = h_sl2(&v, &mut r);
            let e = base_edge(&v);
            let (gx, gy) = (act(&g, &e.a, &v).unwrap(), act(&g, &e.b, &v).unwrap());
            prop_assert_eq!(gx.parity(), 0, "{}", name);
            prop_assert_eq!(gy.parity(), 1, "{}", name);
            prop_assert_eq!(distance(&gx, &gy, &v), 1);
            prop_assert!(!(gx.equals(&e.b, &v) && gy.equals(&e.a, &v)));
        }
    }
}

/// Breadth-first distances from `center`, compared with the closed formula.
fn bfs_check(v: &Valuation, center: &TreeVertex, radius: usize) -> usize {
    let mut seen: Vec<TreeVertex> = vec![center.clone()];
    let mut frontier = vec![center.clone()];
    for level in 1..=radius {
        let mut next = Vec::new();
        for w in &frontier {
            for z in neighbors(w, v, 0).vertices {
                if !seen.iter().any(|x| x.equals(&z, v)) {
                    assert_eq!(distance(center, &z, v), level as u64, "{z}");
                    assert_eq!(geodesic(center, &z, v).len(), level + 1);
                    seen.push(z.clone());
                    next.push(z);
                }
            }
        }
        frontier = next;
    }
    seen.len()
}

#[test]
fn bfs_oracle_distances() {
    let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
    let v2 = Valuation::new(&z, &z.int(2)).unwrap();
    // 1 + 3 + 6 + 12 + 24
    assert_eq!(bfs_check(&v2, &base_vertex(&v2), 4), 46);
    let other = TreeVertex::new(3, z.int(5));
    assert_eq!(bfs_check(&v2, &other, 3), 22);
    let f3 = RingSpec::polynomial(Base::PrimeField(3), &["u"]).unwrap();
    let vu = Valuation::new(&f3, &f3.var("u")).unwrap();
    assert_eq!(bfs_check(&vu, &base_vertex(&vu), 3), 1 + 4 + 12 + 36);
    for v in [&v2, &vu] {
        let d = Mat2::diag(v.pi_pow(-2), v.spec().one()).unwrap();
        let x0 = base_vertex(v);
        assert_eq!(distance(&x0, &act(&d, &x0, v).unwrap(), v), 2);
    }
    assert_eq!(neighbors(&base_vertex(&v2), &v2, 0).vertices.len(), 3);
    assert_eq!(neighbors(&base_vertex(&vu), &vu, 0).vertices.len(), 4);
}
