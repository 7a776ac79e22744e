//! Exact arithmetic and algorithms for SL2 over polynomial rings and their
//! localizations: valuations, the Bruhat-Tits tree, amalgam reduction,
//! matrix witnesses and bounded elementary-word search.

pub mod ring;
pub mod expr;
pub mod sl2;
pub mod tree;
pub mod amalgam;
pub mod search;
pub mod witness;
