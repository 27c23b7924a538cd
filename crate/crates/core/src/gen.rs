//! Seeded instance generators for tests, examples and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SddError};
use crate::graph::{laplacian_of, Edge, WeightedGraph};
use crate::matrix::SparseSymMatrix;

/// `rows x cols` grid with unit weights.
pub fn grid2d(rows: usize, cols: usize) -> WeightedGraph {
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                e.push(Edge::new(v, v + 1, 1.0));
            }
            if r + 1 < rows {
                e.push(Edge::new(v, v + cols, 1.0));
            }
        }
    }
    WeightedGraph::from_edge_list(rows * cols, &e).expect("grid edges are valid")
}

pub fn path(n: usize) -> WeightedGraph {
    let e: Vec<Edge> = (1..n).map(|i| Edge::new(i - 1, i, 1.0)).collect();
    WeightedGraph::from_edge_list(n, &e).expect("path edges are valid")
}

pub fn cycle(n: usize) -> WeightedGraph {
    let e: Vec<Edge> = (0..n).map(|i| Edge::new(i, (i + 1) % n, 1.0)).collect();
    WeightedGraph::from_edge_list(n, &e).expect("cycle edges are valid")
}

/// Star with centre 0 and `leaves` leaves.
pub fn star(leaves: usize) -> WeightedGraph {
    let e: Vec<Edge> = (1..=leaves).map(|i| Edge::new(0, i, 1.0)).collect();
    WeightedGraph::from_edge_list(leaves + 1, &e).expect("star edges are valid")
}

pub fn complete(n: usize) -> WeightedGraph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            e.push(Edge::new(i, j, 1.0));
        }
    }
    WeightedGraph::from_edge_list(n, &e).expect("complete edges are valid")
}

/// Connected graph: a random spanning tree plus `extra` random edges, with
/// weights drawn log-uniformly from `[1/spread, spread]`.
pub fn random_weighted(n: usize, extra: usize, spread: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = |rng: &mut ChaCha8Rng| if spread > 1.0 { spread.powf(rng.random_range(-1.0..=1.0)) } else { 1.0 };
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut e = Vec::new();
    for i in 1..n {
        let p = order[rng.random_range(0..i)];
        e.push(Edge::new(order[i], p, w(&mut rng)));
    }
    if n >= 2 {
        for _ in 0..extra {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                e.push(Edge::new(u, v, w(&mut rng)));
            }
        }
    }
    WeightedGraph::from_edge_list(n, &e).expect("generated edges are valid")
}

/// Random `d`-regular multigraph by the configuration model, duplicate
/// pairs merged and self-loops dropped; retried until connected.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<WeightedGraph> {
    if !(n * d).is_multiple_of(2) || d >= n {
        return Err(SddError::OutOfRange(format!("no {d}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(&mut rng);
        let e: Vec<Edge> = stubs.chunks(2).filter(|p| p[0] != p[1]).map(|p| Edge::new(p[0], p[1], 1.0)).collect();
        let g = WeightedGraph::from_edge_list(n, &e)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(SddError::Precondition("failed to generate a connected regular graph".into()))
}

/// Irreducible `SDDM0` matrix: a random connected Laplacian plus a
/// nonnegative diagonal on about half the vertices (none when `singular`).
pub fn random_sddm(n: usize, extra: usize, singular: bool, seed: u64) -> SparseSymMatrix {
    let g = random_weighted(n, extra, 10.0, seed);
    let lap = laplacian_of(&g);
    if singular {
        return lap;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut d: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { rng.random_range(0.0..2.0) } else { 0.0 }).collect();
    if d.iter().all(|&x| x == 0.0) {
        d[0] = 1.0;
    }
    lap.add_diagonal(&d)
}

/// `SDD0` matrix with some positive off-diagonals: the graph of
/// [`random_sddm`] with a random sign on each edge.
pub fn random_sdd(n: usize, extra: usize, seed: u64) -> SparseSymMatrix {
    let a = random_sddm(n, extra, false, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf11);
    let mut t: Vec<(usize, usize, f64)> = a.off_diagonal().iter().map(|&(i, j, v)| (i, j, if rng.random_bool(0.5) { -v } else { v })).collect();
    t.extend(a.diag().iter().enumerate().map(|(i, &d)| (i, i, d)));
    SparseSymMatrix::from_triplets(n, t).expect("valid triplets")
}
