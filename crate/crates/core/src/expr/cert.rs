use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{parse_elem, parse_matrix, parse_ring_spec};
use crate::ring::{Primality, RingSpec};
use crate::witness::{Check, ClaimTier, SearchBound, WitnessCertificate, WitnessKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("schema error: {0}")]
    SchemaError(String),
}

fn schema(msg: impl Into<String>) -> CertError {
    CertError::SchemaError(msg.into())
}

pub fn certificate_to_json(cert: &WitnessCertificate) -> Value {
    let ingredients: Map<String, Value> = cert
        .ingredients
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
        .collect();
    let checks: Vec<Value> = cert
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "passed": c.passed, "required": c.required, "detail": c.detail}))
        .collect();
    let sb = &cert.search_bound;
    json!({
        "kind": cert.kind.name(),
        "base": cert.base.to_string(),
        "ambient": cert.ambient.to_string(),
        "ring": cert.ring.to_string(),
        "pi": cert.pi.to_string(),
        "ingredients": ingredients,
        "matrices": {
            "a": cert.a.to_string(),
            "b": cert.b.to_string(),
            "h": cert.h.to_string(),
        },
        "primality": match cert.primality {
            Primality::Verified => "verified",
            Primality::Asserted => "asserted",
        },
        "checks": checks,
        "search_bound": {
            "depth": sb.depth,
            "coeff_height_cap": sb.coeff_height_cap,
            "degree_cap": sb.degree_cap,
            "words_enumerated": sb.words_enumerated.to_string(),
            "found": sb.found,
        },
        "claim": cert.claim,
        "claim_tier": cert.claim_tier.name(),
    })
}

/// Deterministic JSON text (sorted keys, two-space indent, trailing newline).
pub fn emit_certificate(cert: &WitnessCertificate) -> String {
    let mut s = serde_json::to_string_pretty(&certificate_to_json(cert)).expect("json values always serialize");
    s.push('\n');
    s
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CertError> {
    v.get(key).ok_or_else(|| schema(format!("missing field \"{key}\"")))
}

fn string<'a>(v: &'a Value, key: &str) -> Result<&'a str, CertError> {
    field(v, key)?.as_str().ok_or_else(|| schema(format!("\"{key}\" must be a string")))
}

fn boolean(v: &Value, key: &str) -> Result<bool, CertError> {
    field(v, key)?.as_bool().ok_or_else(|| schema(format!("\"{key}\" must be a boolean")))
}

fn uint(v: &Value, key: &str) -> Result<u64, CertError> {
    field(v, key)?.as_u64().ok_or_else(|| schema(format!("\"{key}\" must be a nonnegative integer")))
}

fn ring(v: &Value, key: &str) -> Result<RingSpec, CertError> {
    parse_ring_spec(string(v, key)?).map_err(|e| schema(format!("\"{key}\": {e}")))
}

pub fn load_certificate(text: &str) -> Result<WitnessCertificate, CertError> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema(format!("invalid JSON: {e}")))?;
    let kind = WitnessKind::from_name(string(&v, "kind")?).ok_or_else(|| schema("unknown kind"))?;
    let base = ring(&v, "base")?;
    let ambient = ring(&v, "ambient")?;
    let s_ring = ring(&v, "ring")?;
    if **s_ring.ring() != **ambient.ring() {
        return Err(schema("\"ring\" and \"ambient\" have different variables"));
    }
    let s_ring = ambient
        .localize(s_ring.inverted().to_vec())
        .map_err(|e| schema(format!("\"ring\": {e}")))?;
    let elem = |text: &str, what: &str| parse_elem(text, &ambient).map_err(|e| schema(format!("{what}: {e}")));
    let pi = elem(string(&v, "pi")?, "pi")?;
    let ing = field(&v, "ingredients")?
        .as_object()
        .ok_or_else(|| schema("\"ingredients\" must be an object"))?;
    let mut ingredients = BTreeMap::new();
    for (k, e) in ing {
        let text = e.as_str().ok_or_else(|| schema(format!("ingredient {k} must be a string")))?;
        ingredients.insert(k.clone(), elem(text, k)?);
    }
    let mats = field(&v, "matrices")?;
    let mat = |key: &str| -> Result<_, CertError> {
        parse_matrix(string(mats, key)?, &ambient).map_err(|e| schema(format!("matrix {key}: {e}")))
    };
    let (a, b, h) = (mat("a")?, mat("b")?, mat("h")?);
    let primality = match string(&v, "primality")? {
        "verified" => Primality::Verified,
        "asserted" => Primality::Asserted,
        other => return Err(schema(format!("unknown primality {other}"))),
    };
    let checks = field(&v, "checks")?
        .as_array()
        .ok_or_else(|| schema("\"checks\" must be an array"))?
        .iter()
        .map(|c| {
            Ok(Check {
                name: string(c, "name")?.to_string(),
                passed: boolean(c, "passed")?,
                required: boolean(c, "required")?,
                detail: string(c, "detail")?.to_string(),
            })
        })
        .collect::<Result<Vec<_>, CertError>>()?;
    let sb = field(&v, "search_bound")?;
    let search_bound = SearchBound {
        depth: uint(sb, "depth")? as usize,
        coeff_height_cap: uint(sb, "coeff_height_cap")?,
        degree_cap: u32::try_from(uint(sb, "degree_cap")?).map_err(|_| schema("degree_cap too large"))?,
        words_enumerated: string(sb, "words_enumerated")?
            .parse()
            .map_err(|_| schema("words_enumerated must be a decimal string"))?,
        found: boolean(sb, "found")?,
    };
    let claim_tier = match string(&v, "claim_tier")? {
        "TheoremBacked" => ClaimTier::TheoremBacked,
        "SearchVerifiedAtBound" => ClaimTier::SearchVerifiedAtBound,
        other => return Err(schema(format!("unknown claim tier {other}"))),
    };
    Ok(WitnessCertificate {
        kind,
        base,
        ambient,
        ring: s_ring,
        pi,
        ingredients,
        a,
        b,
        h,
        primality,
        checks,
        search_bound,
        claim: string(&v, "claim")?.to_string(),
        claim_tier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Base;
    use crate::witness::{mainstep_ambient, mainstep_witness};

    fn fixture() -> WitnessCertificate {
        let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
        let amb = mainstep_ambient(&z).unwrap();
        let f = parse_elem("1+s*t", &amb).unwrap();
        mainstep_witness(&z, &f, &amb.int(2), false).unwrap()
    }

    #[test]
    fn round_trip_and_determinism() {
        let cert = fixture();
        let text = emit_certificate(&cert);
        assert_eq!(text, emit_certificate(&cert));
        let back = load_certificate(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(emit_certificate(&back), text);
    }

    #[test]
    fn missing_search_bound() {
        let mut v = certificate_to_json(&fixture());
        v.as_object_mut().unwrap().remove("search_bound");
        let err = load_certificate(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("search_bound"));
    }
}
