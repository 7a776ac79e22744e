//! The Bruhat–Tits tree of SL₂(F) for a discrete valuation.
//!
//! A vertex `(n, u)` is the homothety class of the lattice spanned by the
//! columns of `[[1, 0], [u, πⁿ]]`.  `(0, 0)` is the class of 𝒪² and `(1, 0)`
//! the class of 𝒪 ⊕ π𝒪; their stabilizers in SL₂(F) are `A = SL₂(𝒪)` and
//! `B = D(1/π,1)·SL₂(𝒪)·D(π,1)`.

use std::fmt;

use thiserror::Error;

use crate::ring::{QuotientRing, RingElem, Val, Valuation};
use crate::sl2::Mat2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("singular matrix")]
    SingularMatrix,
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(String, String),
}

#[derive(Debug, Clone)]
pub struct TreeVertex {
    pub n: i64,
    pub u: RingElem,
}

impl TreeVertex {
    pub fn new(n: i64, u: RingElem) -> TreeVertex {
        TreeVertex { n, u }
    }

    /// Basis matrix `[[1, 0], [u, πⁿ]]`.
    pub fn basis(&self, v: &Valuation) -> Mat2 {
        let one = v.pi().one_like();
        Mat2::new(one.clone(), one.zero_like(), self.u.clone(), v.pi_pow(self.n))
    }

    /// Vertex type; constant on SL₂(F)-orbits.
    pub fn parity(&self) -> i64 {
        self.n.rem_euclid(2)
    }

    pub fn equals(&self, other: &TreeVertex, v: &Valuation) -> bool {
        self.n == other.n && v.of(&(&self.u - &other.u)).at_least(self.n)
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.u)
    }
}

/// Unordered pair of adjacent vertices.
#[derive(Debug, Clone)]
pub struct TreeEdge {
    pub a: TreeVertex,
    pub b: TreeVertex,
}

impl TreeEdge {
    pub fn new(a: TreeVertex, b: TreeVertex, v: &Valuation) -> Result<TreeEdge, TreeError> {
        if distance(&a, &b, v) != 1 {
            return Err(TreeError::NotAdjacent(a.to_string(), b.to_string()));
        }
        Ok(TreeEdge { a, b })
    }

    pub fn equals(&self, other: &TreeEdge, v: &Valuation) -> bool {
        (self.a.equals(&other.a, v) && self.b.equals(&other.b, v))
            || (self.a.equals(&other.b, v) && self.b.equals(&other.a, v))
    }
}

pub fn base_vertex(v: &Valuation) -> TreeVertex {
    TreeVertex::new(0, v.pi().zero_like())
}

/// `{x₀, y} = {(0, 0), (1, 0)}`.
pub fn base_edge(v: &Valuation) -> TreeEdge {
    let x = base_vertex(v);
    let y = TreeVertex::new(1, v.pi().zero_like());
    TreeEdge { a: x, b: y }
}

/// Class of the lattice spanned by `cols` (column vectors over F).
pub fn lattice_class(cols: &[(RingElem, RingElem)], v: &Valuation) -> Result<TreeVertex, TreeError> {
    let pivot = cols
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.0.is_zero())
        .min_by_key(|(i, c)| (v.of(&c.0), *i))
        .map(|(i, _)| i)
        .ok_or(TreeError::SingularMatrix)?;
    let (a, c) = &cols[pivot];
    let mut best: Option<RingElem> = None;
    let mut best_val = Val::Infinite;
    for (j, col) in cols.iter().enumerate() {
        if j == pivot {
            continue;
        }
        let b = &col.1 - &(&col.0 / a) * c;
        let bv = v.of(&b);
        if bv < best_val {
            best_val = bv;
            best = Some(b);
        }
    }
    let d = best.ok_or(TreeError::SingularMatrix)?;
    let n = v.of(&(&d / a)).finite().unwrap();
    let mut u = c / a;
    if v.of(&u).at_least(n) {
        u = u.zero_like();
    }
    Ok(TreeVertex::new(n, u))
}

fn columns(m: &Mat2) -> [(RingElem, RingElem); 2] {
    [(m.a11.clone(), m.a21.clone()), (m.a12.clone(), m.a22.clone())]
}

/// `g · w`; `g` may be any invertible matrix.
pub fn act(g: &Mat2, w: &TreeVertex, v: &Valuation) -> Result<TreeVertex, TreeError> {
    if g.det().is_zero() {
        return Err(TreeError::SingularMatrix);
    }
    lattice_class(&columns(&g.mul(&w.basis(v))), v)
}

fn change_of_basis(w1: &TreeVertex, w2: &TreeVertex, v: &Valuation) -> Mat2 {
    let m1 = w1.basis(v);
    m1.inv_general().expect("basis is invertible").mul(&w2.basis(v))
}

fn min_val(m: &Mat2, v: &Valuation) -> i64 {
    m.entries()
        .iter()
        .map(|e| v.of(e))
        .min()
        .and_then(Val::finite)
        .expect("nonzero matrix")
}

/// Tree distance: the gap between the elementary-divisor exponents of
/// `M₁⁻¹M₂`.
pub fn distance(w1: &TreeVertex, w2: &TreeVertex, v: &Valuation) -> u64 {
    let x = change_of_basis(w1, w2, v);
    let dv = v.of(&x.det()).finite().unwrap();
    (dv - 2 * min_val(&x, v)) as u64
}

/// Vertices `z₀ = w1, …, z_d = w2` of the geodesic.
pub fn geodesic(w1: &TreeVertex, w2: &TreeVertex, v: &Valuation) -> Vec<TreeVertex> {
    let x = change_of_basis(w1, w2, v);
    let dv = v.of(&x.det()).finite().unwrap();
    let a = min_val(&x, v);
    let d = dv - 2 * a;
    let scale = v.pi_pow(-a);
    let x = x.map(|e| e * &scale);
    let m1 = w1.basis(v);
    let zero = scale.zero_like();
    (0..=d)
        .map(|i| {
            let p = v.pi_pow(i);
            let mut cols = columns(&x).to_vec();
            cols.push((p.clone(), zero.clone()));
            cols.push((zero.clone(), p));
            let z = lattice_class(&cols, v).expect("full-rank lattice");
            act(&m1, &z, v).expect("basis is invertible")
        })
        .collect()
}

/// `M⁻¹gM ∈ M₂(𝒪)` for the basis `M` of `w`.
pub fn stabilizes(g: &Mat2, w: &TreeVertex, v: &Valuation) -> Result<bool, TreeError> {
    if !g.is_sl2() {
        return Err(TreeError::NotUnimodular);
    }
    let m = w.basis(v);
    let c = m.inv_general().unwrap().mul(g).mul(&m);
    Ok(c.entries().iter().all(|e| v.in_valuation_ring(e)))
}

pub fn stabilizes_edge(g: &Mat2, e: &TreeEdge, v: &Valuation) -> Result<bool, TreeError> {
    Ok(stabilizes(g, &e.a, v)? && stabilizes(g, &e.b, v)?)
}

#[derive(Debug, Clone)]
pub struct Neighbors {
    pub vertices: Vec<TreeVertex>,
    /// False when the residue ring is infinite and only a sample was taken.
    pub complete: bool,
}

/// Residue lifts used for neighbors: all of them when `R/πR` is finite,
/// otherwise the canonical zero plus a sample of small values.
pub fn residue_lifts(v: &Valuation, sample: usize) -> (Vec<RingElem>, bool) {
    let q = QuotientRing::of(v).ok();
    if let Some(rs) = q.as_ref().and_then(|q| q.residues()) {
        let q = q.unwrap();
        return (rs.iter().map(|r| q.lift(r)).collect(), true);
    }
    let spec = v.spec();
    let free: Vec<RingElem> = (0..spec.variables().len())
        .filter(|&i| v.variable() != Some(i))
        .map(|i| spec.var_at(i))
        .collect();
    let mut out = vec![spec.zero()];
    let mut k = 1;
    while out.len() < sample.max(1) {
        out.push(spec.int(k));
        out.push(spec.int(-k));
        out.extend(free.iter().map(|x| x.pow(k)));
        k += 1;
    }
    out.truncate(sample.max(1));
    (out, false)
}

/// The neighbors of `w`: `q + 1` of them for a residue field of size `q`.
pub fn neighbors(w: &TreeVertex, v: &Valuation, sample: usize) -> Neighbors {
    let (lifts, complete) = residue_lifts(v, sample);
    let m = w.basis(v);
    let mut vertices: Vec<TreeVertex> = lifts
        .into_iter()
        .map(|r| TreeVertex::new(1, r))
        .collect();
    vertices.push(TreeVertex::new(-1, v.pi().zero_like()));
    let vertices = vertices
        .iter()
        .map(|z| act(&m, z, v).expect("basis is invertible"))
        .collect();
    Neighbors { vertices, complete }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Base, RingSpec};

    fn z2() -> Valuation {
        let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
        Valuation::new(&z, &z.int(2)).unwrap()
    }

    #[test]
    fn base_edge_facts() {
        let v = z2();
        let e = base_edge(&v);
        assert_eq!(distance(&e.a, &e.b, &v), 1);
        let id = Mat2::identity(v.spec());
        assert!(stabilizes_edge(&id, &e, &v).unwrap());
        let d = Mat2::diag(v.pi_pow(-1), v.pi().one_like()).unwrap();
        let image = act(&d, &e.a, &v).unwrap();
        assert_eq!(image.parity(), 1);
    }

    #[test]
    fn action_examples() {
        let v = z2();
        let x0 = base_vertex(&v);
        let one = v.pi().one_like();
        assert!(act(&Mat2::identity(v.spec()), &x0, &v).unwrap().equals(&x0, &v));
        assert!(act(&Mat2::e21(v.pi().clone()), &x0, &v).unwrap().equals(&x0, &v));
        let d = Mat2::diag(v.pi_pow(-2), one.clone()).unwrap();
        let w = act(&d, &x0, &v).unwrap();
        assert!(w.equals(&TreeVertex::new(2, one.zero_like()), &v));
        assert_eq!(distance(&x0, &w, &v), 2);
        let g = geodesic(&x0, &w, &v);
        assert_eq!(g.len(), 3);
        assert!(g[1].equals(&TreeVertex::new(1, one.zero_like()), &v));
    }

    #[test]
    fn stabilizer_examples() {
        let v = z2();
        let e = base_edge(&v);
        let pinv = v.pi_pow(-1);
        let m = Mat2::e12(pinv.clone());
        assert!(stabilizes(&m, &e.b, &v).unwrap());
        assert!(!stabilizes(&m, &e.a, &v).unwrap());
        let m = Mat2::e21(pinv);
        assert!(!stabilizes(&m, &e.a, &v).unwrap());
        assert!(!stabilizes(&m, &e.b, &v).unwrap());
    }

    #[test]
    fn neighbor_counts() {
        let v = z2();
        let x0 = base_vertex(&v);
        let nb = neighbors(&x0, &v, 8);
        assert!(nb.complete);
        assert_eq!(nb.vertices.len(), 3);
        let f3 = RingSpec::polynomial(Base::PrimeField(3), &["u"]).unwrap();
        let vu = Valuation::new(&f3, &f3.var("u")).unwrap();
        let nb = neighbors(&base_vertex(&vu), &vu, 8);
        assert_eq!(nb.vertices.len(), 4);
        for (i, a) in nb.vertices.iter().enumerate() {
            assert_eq!(distance(a, &base_vertex(&vu), &vu), 1);
            for b in &nb.vertices[..i] {
                assert!(!a.equals(b, &vu));
            }
        }
        let zst = RingSpec::polynomial(Base::Integers, &["s", "t"]).unwrap();
        let vt = Valuation::new(&zst, &zst.var("t")).unwrap();
        let nb = neighbors(&base_vertex(&vt), &vt, 5);
        assert!(!nb.complete);
        assert_eq!(nb.vertices.len(), 6);
    }
}
