//! Augmented spanning trees and ultra-sparsifiers.
//!
//! Both constructions decompose a spanning tree into pieces of bounded
//! `eta` mass and add back, for each pair of pieces joined by edges of `E`,
//! the single edge with the best `w / eta` ratio. Ultra-sparsification
//! additionally roots the decomposition at tree splitters, buckets the
//! candidate bridges by `phi = max(psi, stretch)`, and thins each bucket
//! with a sparsifier plugin on the quotient graph.

use rand_chacha::ChaCha8Rng;

use crate::decompose::{decompose, decompose_in, TreeDecomposition};
use crate::error::{Result, SddError};
use crate::graph::{Edge, WeightedGraph};
use crate::sparsify::{Sparsifier, SparsifierChoice};
use crate::tree::{branches_from, build_tree, compute_stretch, eta_of, Centroids, SpanningTree, TreeStrategy};

/// The chosen edge between one pair of decomposition pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bridge {
    pub i: usize,
    pub j: usize,
    /// Index into the edge list passed to [`select_bridges`].
    pub edge: usize,
    /// Total weight of all edges mapped to `{W_i, W_j}`.
    pub omega: f64,
    /// `omega / w(sigma)`.
    pub psi: f64,
}

/// `sigma`, `omega` and `psi` for every pair of pieces joined by an edge,
/// sorted by `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BridgeSelection {
    pub bridges: Vec<Bridge>,
}

impl BridgeSelection {
    pub fn get(&self, i: usize, j: usize) -> Option<&Bridge> {
        let key = (i.min(j), i.max(j));
        self.bridges.binary_search_by(|b| (b.i, b.j).cmp(&key)).ok().map(|k| &self.bridges[k])
    }
}

/// Picks, for every pair `{W_i, W_j}`, the edge maximizing `w / eta`; ties
/// go to the lexicographically least `(u, v)`.
pub fn select_bridges(d: &TreeDecomposition, edges: &[Edge], eta: &[f64]) -> BridgeSelection {
    let mut cand: Vec<(usize, usize, usize)> = (0..edges.len())
        .filter_map(|e| match d.rho(e) {
            &[a, b] if a != b => Some((a.min(b), a.max(b), e)),
            _ => None,
        })
        .collect();
    cand.sort_unstable();
    let mut bridges = Vec::new();
    let mut k = 0;
    while k < cand.len() {
        let (i, j, _) = cand[k];
        let mut best = cand[k].2;
        let mut omega = 0.0;
        while k < cand.len() && cand[k].0 == i && cand[k].1 == j {
            let e = cand[k].2;
            omega += edges[e].w;
            let (re, rb) = (edges[e].w / eta[e], edges[best].w / eta[best]);
            if re > rb || (re == rb && edges[e].key() < edges[best].key()) {
                best = e;
            }
            k += 1;
        }
        bridges.push(Bridge { i, j, edge: best, omega, psi: omega / edges[best].w });
    }
    BridgeSelection { bridges }
}

/// Adds to `t` one bridge per pair of decomposition pieces.
///
/// Requires `1 < budget <= eta(E)`. Returns indices into `edges` of the
/// bridges that are not already edges of `t`; at most `budget^2 / 2`.
pub fn augment_tree(t: &SpanningTree, edges: &[Edge], budget: f64) -> Result<Vec<usize>> {
    let table = compute_stretch(t, edges);
    if !(budget > 1.0 && budget <= table.eta_total) {
        return Err(SddError::OutOfRange(format!("t = {budget} must satisfy 1 < t <= eta(E) = {}", table.eta_total)));
    }
    let d = decompose(t, edges, &table.eta, budget)?;
    let mut out: Vec<usize> = select_bridges(&d, edges, &table.eta)
        .bridges
        .iter()
        .map(|b| b.edge)
        .filter(|&e| !t.has_edge(edges[e].u, edges[e].v, edges[e].w))
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// A spanning tree of `g` plus the bridges of a `t`-piece decomposition,
/// at original weights. Returns `g` itself when `t >= n`.
pub fn ultra_simple(g: &WeightedGraph, budget: f64, strategy: TreeStrategy) -> Result<WeightedGraph> {
    if !g.is_connected() {
        return Err(SddError::Disconnected { components: crate::graph::connected_components(g).len() });
    }
    if budget >= g.n() as f64 {
        return Ok(g.clone());
    }
    let t = build_tree(g, strategy)?;
    if g.m() + 1 == g.n() {
        return Ok(g.clone());
    }
    let eta_total = compute_stretch(&t, g.edges()).eta_total;
    let f = augment_tree(&t, g.edges(), budget.min(eta_total))?;
    let mut edges = t.edges();
    edges.extend(f.into_iter().map(|id| g.edges()[id]));
    WeightedGraph::from_edge_list(g.n(), &edges)
}

/// Sizes of the `phi` buckets produced by a rooted call.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BucketStats {
    pub candidates: Vec<usize>,
    pub kept: Vec<usize>,
}

impl BucketStats {
    fn absorb(&mut self, other: &BucketStats) {
        for (dst, src) in [(&mut self.candidates, &other.candidates), (&mut self.kept, &other.kept)] {
            if dst.len() < src.len() {
                dst.resize(src.len(), 0);
            }
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
    }
}

/// Sparsifies edges whose tree paths all pass through `r`.
///
/// Returns indices into `edges` of the kept edges, which carry their
/// original weights.
pub fn rooted_ultra_sparsify(
    edges: &[Edge],
    t: &SpanningTree,
    r: usize,
    budget: f64,
    p: f64,
    sparsifier: &dyn Sparsifier,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, BucketStats)> {
    let rooted = t.rerooted(r);
    for e in edges {
        if !passes_through_root(&rooted, e.u, e.v) {
            return Err(SddError::Precondition(format!("tree path of ({}, {}) avoids {r}", e.u, e.v)));
        }
    }
    let stretch = compute_stretch(t, edges).stretch;
    let all: Vec<usize> = (0..edges.len()).collect();
    Ok(rooted_in(t.adjacency(), &vec![false; t.n()], r, edges, &all, &stretch, budget, p, sparsifier, rng))
}

fn passes_through_root(t: &SpanningTree, u: usize, v: usize) -> bool {
    let top = |mut x: usize| {
        while t.depth(x) > 1 {
            x = t.parent(x);
        }
        x
    };
    u == t.root() || v == t.root() || top(u) != top(v)
}

#[allow(clippy::too_many_arguments)]
fn rooted_in(
    adj: &[Vec<(usize, f64)>],
    removed: &[bool],
    r: usize,
    all_edges: &[Edge],
    ids: &[usize],
    stretch: &[f64],
    budget: f64,
    p: f64,
    sparsifier: &dyn Sparsifier,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, BucketStats) {
    if budget >= ids.len() as f64 {
        return (ids.to_vec(), BucketStats::default());
    }
    let edges: Vec<Edge> = ids.iter().map(|&i| all_edges[i]).collect();
    let local_stretch: Vec<f64> = ids.iter().map(|&i| stretch[i]).collect();
    let (eta, eta_total) = eta_of(&local_stretch);
    let d = decompose_in(adj, removed, r, &edges, &eta, budget.max(1.0));
    let sel = select_bridges(&d, &edges, &eta);

    let nb = (eta_total.log2().ceil() as usize).max(1);
    let mut buckets: Vec<Vec<&crate::ultra::Bridge>> = vec![Vec::new(); nb];
    for b in &sel.bridges {
        let phi = b.psi.max(local_stretch[b.edge]);
        let k = if phi <= 2.0 { 0 } else { (phi.log2().ceil() as usize - 1).min(nb - 1) };
        buckets[k].push(b);
    }
    let mut stats = BucketStats { candidates: vec![0; nb], kept: vec![0; nb] };
    let mut out = Vec::new();
    for (k, bucket) in buckets.iter().enumerate() {
        if bucket.is_empty() {
            continue;
        }
        stats.candidates[k] = bucket.len();
        let h = WeightedGraph::from_edges(d.h(), bucket.iter().map(|b| (b.i, b.j, b.omega))).expect("quotient graph");
        let hs = sparsifier.sparsify(&h, p, rng);
        for e in hs.edges() {
            let b = sel.get(e.u, e.v).expect("sparsifier kept an edge outside its input");
            out.push(ids[b.edge]);
            stats.kept[k] += 1;
        }
    }
    out.sort_unstable();
    out.dedup();
    (out, stats)
}

/// One rooted call made by [`tree_ultra_sparsify`].
#[derive(Debug, Clone, PartialEq)]
pub struct RootedCall {
    pub root: usize,
    /// Indices into the input edge list whose tree paths pass through `root`.
    pub considered: Vec<usize>,
    pub budget: f64,
    /// Whether the rooted sparsifier actually ran (`t_r > 1`).
    pub ran: bool,
}

#[derive(Debug, Clone, Default)]
pub struct TreeUltraOutput {
    /// Indices into the input edge list.
    pub kept: Vec<usize>,
    pub calls: Vec<RootedCall>,
    pub buckets: BucketStats,
}

/// Splits `t` at splitters recursively and sparsifies the edges crossing
/// each splitter with a budget proportional to their `eta` share.
pub fn tree_ultra_sparsify(
    edges: &[Edge],
    budget: f64,
    t: &SpanningTree,
    p: f64,
    sparsifier: &dyn Sparsifier,
    rng: &mut ChaCha8Rng,
) -> Result<TreeUltraOutput> {
    let table = compute_stretch(t, edges);
    Ok(tree_ultra_in(edges, &table.stretch, &table.eta, budget, t, p, sparsifier, rng))
}

#[allow(clippy::too_many_arguments)]
fn tree_ultra_in(
    edges: &[Edge],
    stretch: &[f64],
    eta: &[f64],
    budget: f64,
    t: &SpanningTree,
    p: f64,
    sparsifier: &dyn Sparsifier,
    rng: &mut ChaCha8Rng,
) -> TreeUltraOutput {
    let mut out = TreeUltraOutput::default();
    if edges.is_empty() {
        return out;
    }
    let adj = t.adjacency();
    let mut cent = Centroids::new(adj);
    let mut branch = vec![usize::MAX; t.n()];
    let mut stack: Vec<(usize, Vec<usize>, f64)> = vec![(edges[0].u, (0..edges.len()).collect(), budget)];
    while let Some((start, ids, tb)) = stack.pop() {
        if ids.is_empty() {
            continue;
        }
        let (r, _) = cent.find(start);
        let nbrs = branches_from(adj, &cent.removed, r, &mut branch);
        let eta_all: f64 = ids.iter().map(|&i| eta[i]).sum();
        let mut through = Vec::new();
        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); nbrs.len()];
        for &i in &ids {
            let e = &edges[i];
            if e.u == r || e.v == r || branch[e.u] != branch[e.v] {
                through.push(i);
            } else {
                parts[branch[e.u]].push(i);
            }
        }
        if !through.is_empty() {
            let eta_r: f64 = through.iter().map(|&i| eta[i]).sum();
            let tr = (tb * eta_r / eta_all).ceil();
            let ran = tr > 1.0;
            if ran {
                let (kept, stats) = rooted_in(adj, &cent.removed, r, edges, &through, stretch, tr, p, sparsifier, rng);
                out.kept.extend(kept);
                out.buckets.absorb(&stats);
            }
            out.calls.push(RootedCall { root: r, considered: through, budget: tr, ran });
        }
        cent.removed[r] = true;
        for (b, part) in parts.into_iter().enumerate().rev() {
            if !part.is_empty() {
                let eta_i: f64 = part.iter().map(|&i| eta[i]).sum();
                stack.push((nbrs[b], part, tb * eta_i / eta_all));
            }
        }
    }
    out.kept.sort_unstable();
    out
}

/// How the decomposition budget `t` of [`ultra_sparsify`] is chosen.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum UltraBudget {
    /// `t = C max(1, log2 eta(E)) ceil(log_{3/2} n) eta(E) / k`; the
    /// analysis uses `C = 517`.
    Formula { constant: f64 },
    /// A fixed `t`.
    Direct(f64),
    /// `t` equal to a fraction of the number of off-tree edges.
    OffTreeFraction(f64),
}

impl Default for UltraBudget {
    fn default() -> Self {
        UltraBudget::Formula { constant: 517.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct UltraConfig {
    pub tree: TreeStrategy,
    pub budget: UltraBudget,
    pub sparsifier: SparsifierChoice,
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UltraStats {
    pub eta_total: f64,
    pub t: f64,
    pub p: f64,
    pub off_tree: usize,
    pub rooted_calls: usize,
    pub buckets: BucketStats,
}

/// A spanning tree plus extra edges, all taken from the input graph at
/// their original weights.
#[derive(Debug, Clone)]
pub struct UltraSparsifier {
    pub n: usize,
    pub tree_edges: Vec<Edge>,
    pub extra_edges: Vec<Edge>,
    pub k: f64,
    pub stats: UltraStats,
}

impl UltraSparsifier {
    pub fn graph(&self) -> WeightedGraph {
        let mut e = self.tree_edges.clone();
        e.extend_from_slice(&self.extra_edges);
        WeightedGraph::from_edge_list(self.n, &e).expect("subgraph of a valid graph")
    }

    pub fn edge_count(&self) -> usize {
        self.tree_edges.len() + self.extra_edges.len()
    }
}

/// Builds `U = T + A` targeting `U <= E <= k U`.
pub fn ultra_sparsify(g: &WeightedGraph, k: f64, cfg: &UltraConfig, rng: &mut ChaCha8Rng) -> Result<UltraSparsifier> {
    if !(k >= 1.0) {
        return Err(SddError::OutOfRange(format!("k = {k} must be at least 1")));
    }
    let t = build_tree(g, cfg.tree)?;
    let n = g.n();
    let tree_edges = t.edges();
    let (off, off_edges): (Vec<usize>, Vec<Edge>) = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| !t.has_edge(e.u, e.v, e.w))
        .map(|(i, e)| (i, *e))
        .unzip();
    let table = compute_stretch(&t, &off_edges);
    let eta_total = table.eta_total + tree_edges.len() as f64;
    let budget = match cfg.budget {
        UltraBudget::Formula { constant } => {
            let levels = ((n.max(2) as f64).ln() / 1.5f64.ln()).ceil();
            constant * eta_total.log2().max(1.0) * levels * eta_total / k
        }
        UltraBudget::Direct(t) => t,
        UltraBudget::OffTreeFraction(f) => f * off.len() as f64,
    };
    let p = 1.0 / (2.0 * eta_total.log2().ceil().max(1.0) * (n as f64).powi(2));
    let mut stats = UltraStats { eta_total, t: budget, p, off_tree: off.len(), ..Default::default() };
    let extra_edges = if budget >= eta_total {
        off_edges
    } else {
        let res = tree_ultra_in(&off_edges, &table.stretch, &table.eta, budget, &t, p, &cfg.sparsifier, rng);
        stats.rooted_calls = res.calls.iter().filter(|c| c.ran).count();
        stats.buckets = res.buckets;
        res.kept.iter().map(|&i| off_edges[i]).collect()
    };
    Ok(UltraSparsifier { n, tree_edges, extra_edges, k, stats })
}
