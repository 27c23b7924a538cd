//! Positively weighted undirected graphs and their Laplacians.
//!
//! A [`WeightedGraph`] is the combinatorial view of a Laplacian matrix: the
//! off-diagonal entry `(u, v)` of `L_G` is `-w(u, v)` and the diagonal holds
//! weighted degrees. Edges are stored canonically with `u < v`, so an edge id
//! is a stable index into [`WeightedGraph::edges`].

use std::collections::BTreeMap;

use crate::error::{Result, SddError};
use crate::matrix::SparseSymMatrix;

/// A weighted edge `w<u, v>`; canonical form has `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: f64) -> Self {
        if u <= v {
            Edge { u, v, w }
        } else {
            Edge { u: v, v: u, w }
        }
    }

    /// Resistance of the edge, `1 / w`.
    pub fn resistance(&self) -> f64 {
        1.0 / self.w
    }

    pub fn key(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    /// The endpoint opposite `x`.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected graph with strictly positive weights, no self-loops and no
/// parallel edges.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    // CSR adjacency: neighbors of v are adj[offsets[v]..offsets[v+1]] as (nbr, edge id)
    offsets: Vec<usize>,
    adj: Vec<(usize, usize)>,
}

impl WeightedGraph {
    /// Builds a graph from raw `(u, v, w)` triples.
    ///
    /// Zero weights are dropped, parallel edges are merged by summing their
    /// weights (conductances in parallel add), and edges are sorted by
    /// `(u, v)`. Negative or non-finite weights, self-loops and out-of-range
    /// ids are rejected.
    pub fn from_edges(n: usize, raw: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in raw {
            if u >= n || v >= n {
                return Err(SddError::InvalidEdge { u, v, reason: format!("vertex id out of range 0..{n}") });
            }
            if u == v {
                return Err(SddError::InvalidEdge { u, v, reason: "self-loop".into() });
            }
            if !w.is_finite() {
                return Err(SddError::InvalidEdge { u, v, reason: "non-finite weight".into() });
            }
            if w < 0.0 {
                return Err(SddError::InvalidEdge { u, v, reason: "negative weight".into() });
            }
            if w == 0.0 {
                continue;
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges = merged.into_iter().map(|((u, v), w)| Edge { u, v, w }).collect();
        Ok(Self::from_canonical(n, edges))
    }

    /// Builds a graph from edges already known to be canonical, sorted and
    /// free of duplicates. Used internally where subgraphs are extracted.
    pub(crate) fn from_canonical(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|p| p[0].key() < p[1].key()));
        let mut deg = vec![0usize; n + 1];
        for e in &edges {
            deg[e.u + 1] += 1;
            deg[e.v + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let offsets = deg;
        let mut fill = offsets.clone();
        let mut adj = vec![(0, 0); 2 * edges.len()];
        for (id, e) in edges.iter().enumerate() {
            adj[fill[e.u]] = (e.v, id);
            fill[e.u] += 1;
            adj[fill[e.v]] = (e.u, id);
            fill[e.v] += 1;
        }
        WeightedGraph { n, edges, offsets, adj }
    }

    /// Builds a graph from an arbitrary list of edges (any orientation, any
    /// order) that contains no duplicate pairs.
    pub fn from_edge_list(n: usize, edges: &[Edge]) -> Result<Self> {
        Self::from_edges(n, edges.iter().map(|e| (e.u, e.v, e.w)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` as `(neighbor, edge id)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.neighbors(v).iter().map(|&(_, id)| self.edges[id].w).sum()
    }

    /// Looks up the edge id joining `u` and `v`.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a).iter().find(|&&(x, _)| x == b).map(|&(_, id)| id)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || connected_components(self).len() == 1
    }
}

/// The Laplacian `L_G`: weighted degrees on the diagonal, `-w` off it.
pub fn laplacian_of(g: &WeightedGraph) -> SparseSymMatrix {
    let mut diag = vec![0.0; g.n()];
    let mut off = Vec::with_capacity(g.m());
    for e in g.edges() {
        diag[e.u] += e.w;
        diag[e.v] += e.w;
        off.push((e.u, e.v, -e.w));
    }
    SparseSymMatrix::from_canonical(g.n(), diag, off)
}

/// `x^T L_G x = sum_e w_e (x_u - x_v)^2`.
pub fn quadratic_form(g: &WeightedGraph, x: &[f64]) -> Result<f64> {
    if x.len() != g.n() {
        return Err(SddError::DimensionMismatch { expected: g.n(), got: x.len() });
    }
    Ok(g.edges().iter().map(|e| e.w * (x[e.u] - x[e.v]).powi(2)).sum())
}

/// Vertex partition by edge connectivity. Components are listed in order of
/// their smallest vertex, and each component is sorted.
pub fn connected_components(g: &WeightedGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &(u, _) in g.neighbors(v) {
                if comp[u] == usize::MAX {
                    comp[u] = id;
                    members.push(u);
                    stack.push(u);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` when the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
