//! Admissible two-colored graphs.
//!
//! A graph has `n` aerial vertices (drawn in the upper half-plane) and `m`
//! terrestrial vertices (on the real line).  Every edge starts at an aerial
//! vertex; the edges leaving a vertex are ordered.  Self-loops and parallel
//! edges are excluded.  The ordered out-lists, not an unordered edge set,
//! are the identity of the graph: swapping two out-edges gives a different
//! graph (with the opposite weight sign).

use crate::error::{Error, Result};
use itertools::Itertools;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Vertex {
    Aerial(u8),
    Terrestrial(u8),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Aerial(k) => write!(f, "a{k}"),
            Vertex::Terrestrial(j) => write!(f, "g{j}"),
        }
    }
}

/// One labeled edge: the `slot`-th edge leaving aerial vertex `src`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub slot: usize,
    pub tgt: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AdmissibleGraph {
    n: usize,
    m: usize,
    star: Vec<Vec<Vertex>>,
}

impl AdmissibleGraph {
    pub fn new(n: usize, m: usize, star: Vec<Vec<Vertex>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("a graph needs at least one aerial vertex"));
        }
        if n > u8::MAX as usize || m > u8::MAX as usize {
            return Err(Error::validation("vertex count out of range"));
        }
        if star.len() != n {
            return Err(Error::validation(
                "one ordered out-list per aerial vertex is required",
            ));
        }
        for (k, out) in star.iter().enumerate() {
            for (pos, tgt) in out.iter().enumerate() {
                match *tgt {
                    Vertex::Aerial(t) if (t as usize) >= n => {
                        return Err(Error::validation("edge target out of range"));
                    }
                    Vertex::Aerial(t) if (t as usize) == k => {
                        return Err(Error::validation("self-loops are not admissible"));
                    }
                    Vertex::Terrestrial(j) if (j as usize) >= m => {
                        return Err(Error::validation("edge target out of range"));
                    }
                    _ => {}
                }
                if out[..pos].contains(tgt) {
                    return Err(Error::validation("parallel edges are not admissible"));
                }
            }
        }
        Ok(AdmissibleGraph { n, m, star })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn star(&self, k: usize) -> &[Vertex] {
        &self.star[k]
    }

    pub fn star_sizes(&self) -> Vec<usize> {
        self.star.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.star.iter().map(Vec::len).sum()
    }

    /// Edges in lexicographic order: all of vertex 0's star, then vertex 1's, ...
    pub fn edges(&self) -> Vec<Edge> {
        self.star
            .iter()
            .enumerate()
            .flat_map(|(src, out)| {
                out.iter()
                    .enumerate()
                    .map(move |(slot, &tgt)| Edge { src, slot, tgt })
            })
            .collect()
    }

    /// Dimension of the reduced configuration space the weight integrates over.
    pub fn config_dimension(&self) -> usize {
        2 * self.n + self.m - 2
    }

    /// The weight form is top-degree only when one angle form per dimension is present.
    pub fn is_dimension_matched(&self) -> bool {
        self.edge_count() == self.config_dimension()
    }

    pub fn canonical(&self) -> String {
        let stars = self
            .star
            .iter()
            .map(|out| out.iter().map(|v| v.to_string()).join(" "))
            .join("|");
        format!("{},{}:[{}]", self.n, self.m, stars)
    }

    /// Stable 64-bit fingerprint of the canonical form (FNV-1a).
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.canonical().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

impl fmt::Display for AdmissibleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// All admissible graphs whose vertex `k` has exactly `sizes[k]` out-edges,
/// in a deterministic order.
pub fn enumerate_with_star_sizes(
    n: usize,
    m: usize,
    sizes: &[usize],
) -> Result<Vec<AdmissibleGraph>> {
    if sizes.len() != n {
        return Err(Error::precondition("one star size per aerial vertex"));
    }
    if n == 0 || n > u8::MAX as usize || m > u8::MAX as usize {
        return Err(Error::precondition("vertex count out of range"));
    }
    let mut per_vertex: Vec<Vec<Vec<Vertex>>> = Vec::with_capacity(n);
    for (k, &s) in sizes.iter().enumerate() {
        let pool: Vec<Vertex> = (0..n)
            .filter(|&t| t != k)
            .map(|t| Vertex::Aerial(t as u8))
            .chain((0..m).map(|j| Vertex::Terrestrial(j as u8)))
            .collect();
        if s > pool.len() {
            return Ok(Vec::new());
        }
        per_vertex.push(pool.into_iter().permutations(s).collect());
    }
    let graphs = per_vertex
        .into_iter()
        .multi_cartesian_product()
        .map(|star| AdmissibleGraph { n, m, star })
        .collect();
    Ok(graphs)
}

/// All admissible graphs with `n` aerial and `m` terrestrial vertices and
/// `edge_count` edges in total, in a deterministic order.
pub fn enumerate_graphs(n: usize, m: usize, edge_count: usize) -> Result<Vec<AdmissibleGraph>> {
    if n == 0 {
        return Err(Error::precondition("a graph needs at least one aerial vertex"));
    }
    let cap = n + m - 1;
    let mut out = Vec::new();
    let mut sizes = vec![0usize; n];
    fill_sizes(n, m, cap, edge_count, 0, &mut sizes, &mut out)?;
    Ok(out)
}

fn fill_sizes(
    n: usize,
    m: usize,
    cap: usize,
    remaining: usize,
    k: usize,
    sizes: &mut Vec<usize>,
    out: &mut Vec<AdmissibleGraph>,
) -> Result<()> {
    if k == n {
        if remaining == 0 {
            out.extend(enumerate_with_star_sizes(n, m, sizes)?);
        }
        return Ok(());
    }
    let left_cap = cap * (n - k - 1);
    for s in 0..=cap.min(remaining) {
        if remaining - s > left_cap {
            continue;
        }
        sizes[k] = s;
        fill_sizes(n, m, cap, remaining - s, k + 1, sizes, out)?;
    }
    sizes[k] = 0;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_wedge_is_unique() {
        let graphs = enumerate_graphs(1, 1, 1).unwrap();
        assert_eq!(graphs.len(), 1);
        assert_eq!(graphs[0].star(0), &[Vertex::Terrestrial(0)]);
        assert!(graphs[0].is_dimension_matched());
    }

    #[test]
    fn one_aerial_vertex_counts_are_factorials() {
        for m in 1..=4usize {
            let graphs = enumerate_graphs(1, m, m).unwrap();
            let expected: usize = (1..=m).product();
            assert_eq!(graphs.len(), expected);
        }
    }

    #[test]
    fn enumeration_matches_the_selection_count() {
        // star sizes (s1, s2) with s1 + s2 = 4 over 3 targets each:
        // sum of P(3, s1) * P(3, s2).
        let graphs = enumerate_graphs(2, 2, 4).unwrap();
        let p = |s: usize| -> usize { (3 - s + 1..=3).product::<usize>() };
        let expected = p(1) * p(3) + p(2) * p(2) + p(3) * p(1);
        assert_eq!(graphs.len(), expected);
    }

    #[test]
    fn enumerated_graphs_revalidate() {
        for g in enumerate_graphs(2, 2, 3).unwrap() {
            let again = AdmissibleGraph::new(g.n(), g.m(), (0..g.n()).map(|k| g.star(k).to_vec()).collect());
            assert!(again.is_ok(), "enumerated graph failed validation: {g}");
        }
    }

    #[test]
    fn loops_and_parallel_edges_are_rejected() {
        assert!(AdmissibleGraph::new(1, 1, vec![vec![Vertex::Aerial(0)]]).is_err());
        assert!(AdmissibleGraph::new(
            1,
            2,
            vec![vec![Vertex::Terrestrial(0), Vertex::Terrestrial(0)]]
        )
        .is_err());
        assert!(AdmissibleGraph::new(1, 1, vec![vec![Vertex::Terrestrial(1)]]).is_err());
        assert!(AdmissibleGraph::new(2, 0, vec![vec![Vertex::Aerial(1)]]).is_err());
    }

    #[test]
    fn canonical_forms_separate_edge_orders() {
        let a = AdmissibleGraph::new(
            1,
            2,
            vec![vec![Vertex::Terrestrial(0), Vertex::Terrestrial(1)]],
        )
        .unwrap();
        let b = AdmissibleGraph::new(
            1,
            2,
            vec![vec![Vertex::Terrestrial(1), Vertex::Terrestrial(0)]],
        )
        .unwrap();
        assert_ne!(a.canonical(), b.canonical());
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.canonical(), "1,2:[g0 g1]");
    }

    #[test]
    fn edges_come_out_in_lexicographic_order() {
        let g = AdmissibleGraph::new(
            2,
            1,
            vec![
                vec![Vertex::Aerial(1), Vertex::Terrestrial(0)],
                vec![Vertex::Terrestrial(0)],
            ],
        )
        .unwrap();
        let edges = g.edges();
        assert_eq!(edges.len(), 3);
        assert_eq!((edges[0].src, edges[0].slot), (0, 0));
        assert_eq!((edges[1].src, edges[1].slot), (0, 1));
        assert_eq!((edges[2].src, edges[2].slot), (1, 0));
        assert_eq!(g.config_dimension(), 3);
        assert!(g.is_dimension_matched());
    }
}
