//! Input language for rings, elements and matrices; certificate JSON; DOT.

mod cert;
mod dot;
mod parse;

pub use cert::{certificate_to_json, emit_certificate, load_certificate, CertError};
pub use dot::{neighborhood_dot, path_dot};
pub use parse::{parse_elem, parse_matrix, parse_ring_spec, ParseError};

use crate::ring::RingElem;
use crate::sl2::Mat2;

/// Text form of an element; parses back to an equal value.
pub fn format_elem(e: &RingElem) -> String {
    e.to_string()
}

pub fn format_matrix(m: &Mat2) -> String {
    m.to_string()
}
