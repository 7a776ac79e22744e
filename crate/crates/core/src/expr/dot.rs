use std::fmt::Write;

use crate::ring::Valuation;
use crate::tree::{neighbors, TreeVertex};

/// Radius-`k` ball around `center` in DOT format.  Returns the text and
/// whether the ball is complete (finite residue field).
pub fn neighborhood_dot(center: &TreeVertex, radius: u32, v: &Valuation, sample: usize) -> (String, bool) {
    let mut nodes: Vec<TreeVertex> = vec![center.clone()];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut frontier = vec![0usize];
    let mut complete = true;
    for _ in 0..radius {
        let mut next = Vec::new();
        for &i in &frontier {
            let nb = neighbors(&nodes[i], v, sample);
            complete &= nb.complete;
            for w in nb.vertices {
                match nodes.iter().position(|x| x.equals(&w, v)) {
                    Some(j) => {
                        if !edges.contains(&(j, i)) && !edges.contains(&(i, j)) {
                            edges.push((i, j));
                        }
                    }
                    None => {
                        nodes.push(w);
                        let j = nodes.len() - 1;
                        edges.push((i, j));
                        next.push(j);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut out = String::from("graph tree {\n");
    for (i, w) in nodes.iter().enumerate() {
        let label = w.to_string().replace('"', "\\\"");
        writeln!(out, "  v{i} [label=\"{label}\"];").unwrap();
    }
    for (i, j) in edges {
        writeln!(out, "  v{i} -- v{j};").unwrap();
    }
    out.push_str("}\n");
    (out, complete)
}

/// A path as a DOT chain.
pub fn path_dot(path: &[TreeVertex]) -> String {
    let mut out = String::from("graph path {\n");
    for (i, w) in path.iter().enumerate() {
        writeln!(out, "  v{i} [label=\"{w}\"];").unwrap();
    }
    for i in 1..path.len() {
        writeln!(out, "  v{} -- v{i};", i - 1).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Base, RingSpec};
    use crate::tree::base_vertex;

    #[test]
    fn radius_two_ball_over_z2() {
        let z = RingSpec::polynomial(Base::Integers, &[]).unwrap();
        let v = Valuation::new(&z, &z.int(2)).unwrap();
        let (dot, complete) = neighborhood_dot(&base_vertex(&v), 2, &v, 4);
        assert!(complete);
        // 1 + 3 + 6 vertices, 9 edges
        assert_eq!(dot.matches("label=").count(), 10);
        assert_eq!(dot.matches(" -- ").count(), 9);
        assert!(dot.contains("label=\"(0, 0)\""));
    }
}
