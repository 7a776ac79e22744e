mod common;

use proptest::prelude::*;

use common::*;
use sl2gen::expr::{format_elem, format_matrix, parse_elem, parse_matrix, parse_ring_spec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn element_and_matrix_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        for (name, v) in local_rings() {
            let spec = v.spec();
            let e = fraction(spec, &mut r);
            let text = format_elem(&e);
            prop_assert_eq!(parse_elem(&text, spec).unwrap(), e, "{}: {}", name, text);
            let m = field_sl2(spec, &mut r);
            let text = format_matrix(&m);
            prop_assert_eq!(parse_matrix(&text, spec).unwrap(), m, "{}: {}", name, text);
        }
    }
}

#[test]
fn ring_specs_round_trip() {
    for text in ["Z", "Z[s,t]", "Z[s,t] loc(s,t,1-s,1+s*t)", "F3[u] loc(u)", "F7[a,b,c] loc(a*b+1)"] {
        let spec = parse_ring_spec(text).unwrap();
        assert_eq!(parse_ring_spec(&spec.to_string()).unwrap(), spec, "{text}");
    }
}
