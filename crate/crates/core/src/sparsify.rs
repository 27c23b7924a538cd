//! Sparsifier plugins used inside ultra-sparsification.
//!
//! A plugin maps a graph `H` to a reweighted subgraph `H_s` whose edges are
//! a subset of `H`'s and whose per-vertex reweighting satisfies
//! `sum_j w_s(i,j) / w(i,j) <= 2 deg_H(i)`. Spectral closeness is the goal
//! but is not something a plugin can certify.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SddError};
use crate::graph::{connected_components, Edge, WeightedGraph};
use crate::tree::{build_tree, compute_stretch, TreeStrategy};

pub trait Sparsifier: Send + Sync {
    fn name(&self) -> &'static str;
    fn sparsify(&self, h: &WeightedGraph, p: f64, rng: &mut ChaCha8Rng) -> WeightedGraph;
}

/// Returns its input.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentitySparsifier;

impl Sparsifier for IdentitySparsifier {
    fn name(&self) -> &'static str {
        "identity"
    }
    fn sparsify(&self, h: &WeightedGraph, _p: f64, _rng: &mut ChaCha8Rng) -> WeightedGraph {
        h.clone()
    }
}

/// Drops everything; ultra-sparsifiers degenerate to bare trees.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmptySparsifier;

impl Sparsifier for EmptySparsifier {
    fn name(&self) -> &'static str {
        "none"
    }
    fn sparsify(&self, h: &WeightedGraph, _p: f64, _rng: &mut ChaCha8Rng) -> WeightedGraph {
        WeightedGraph::from_canonical(h.n(), Vec::new())
    }
}

/// Importance sampling by stretch in a low-stretch spanning forest of `H`.
///
/// Forest edges are always kept. An off-forest edge with stretch `s_e` is
/// kept with probability `p_e = min(1, N s_e / sum s)` and reweighted by
/// `1 / p_e`, where `N = q n ln(n / p)`; the reweighting is then capped
/// per vertex so the degree bound holds deterministically.
#[derive(Debug, Clone, Copy)]
pub struct StretchSampler {
    pub q: f64,
}

impl Default for StretchSampler {
    fn default() -> Self {
        StretchSampler { q: 4.0 }
    }
}

impl Sparsifier for StretchSampler {
    fn name(&self) -> &'static str {
        "default"
    }

    fn sparsify(&self, h: &WeightedGraph, p: f64, rng: &mut ChaCha8Rng) -> WeightedGraph {
        let n = h.n();
        if n < 2 || h.m() == 0 {
            return h.clone();
        }
        let p = p.clamp(f64::MIN_POSITIVE, 0.5);
        let log_term = (n as f64 / p).ln().max(1.0);
        let max_deg = (0..n).map(|v| h.degree(v)).max().unwrap_or(0);
        let budget = self.q * n as f64 * log_term;
        if max_deg as f64 <= self.q * log_term || h.m() as f64 <= budget {
            return h.clone();
        }

        // forest edges and stretch of everything else, one component at a time
        let mut in_forest = vec![false; h.m()];
        let mut stretch = vec![0.0; h.m()];
        let mut local = vec![usize::MAX; n];
        for comp in connected_components(h) {
            if comp.len() < 2 {
                continue;
            }
            for (i, &v) in comp.iter().enumerate() {
                local[v] = i;
            }
            let ids: Vec<usize> = comp
                .iter()
                .flat_map(|&v| h.neighbors(v).iter().filter(move |&&(u, _)| v < u).map(|&(_, id)| id))
                .collect();
            let sub_edges: Vec<Edge> =
                ids.iter().map(|&id| Edge::new(local[h.edges()[id].u], local[h.edges()[id].v], h.edges()[id].w)).collect();
            let sub = WeightedGraph::from_edge_list(comp.len(), &sub_edges).expect("component subgraph");
            let tree = build_tree(&sub, TreeStrategy::ClusterLowStretch).expect("component is connected");
            let table = compute_stretch(&tree, &sub_edges);
            for (k, &id) in ids.iter().enumerate() {
                if tree.has_edge(sub_edges[k].u, sub_edges[k].v, sub_edges[k].w) {
                    in_forest[id] = true;
                } else {
                    stretch[id] = table.stretch[k];
                }
            }
        }

        let off_total: f64 = (0..h.m()).filter(|&i| !in_forest[i]).map(|i| stretch[i]).sum();
        let samples = budget;
        let mut ratio = vec![0.0; h.m()];
        for i in 0..h.m() {
            if in_forest[i] {
                ratio[i] = 1.0;
            } else if off_total > 0.0 {
                let pe = (samples * stretch[i] / off_total).min(1.0);
                if pe > 0.0 && rng.random::<f64>() < pe {
                    ratio[i] = 1.0 / pe;
                }
            }
        }
        cap_reweighting(h, &mut ratio);
        let kept = h
            .edges()
            .iter()
            .zip(&ratio)
            .filter(|(_, &r)| r > 0.0)
            .map(|(e, &r)| Edge { u: e.u, v: e.v, w: e.w * r })
            .collect();
        WeightedGraph::from_canonical(n, kept)
    }
}

/// Scales reweighting ratios so every vertex satisfies
/// `sum of incident ratios <= 2 deg(v)`.
fn cap_reweighting(h: &WeightedGraph, ratio: &mut [f64]) {
    let n = h.n();
    let mut sum = vec![0.0; n];
    for (e, &r) in h.edges().iter().zip(ratio.iter()) {
        sum[e.u] += r;
        sum[e.v] += r;
    }
    let factor: Vec<f64> = (0..n)
        .map(|v| {
            let cap = 2.0 * h.degree(v) as f64;
            if sum[v] > cap {
                cap / sum[v]
            } else {
                1.0
            }
        })
        .collect();
    for (e, r) in h.edges().iter().zip(ratio.iter_mut()) {
        *r *= factor[e.u].min(factor[e.v]);
    }
}

/// Serializable selection of one of the built-in plugins.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum SparsifierChoice {
    Default { q: f64 },
    Identity,
    None,
}

impl Default for SparsifierChoice {
    fn default() -> Self {
        SparsifierChoice::Default { q: StretchSampler::default().q }
    }
}

impl Sparsifier for SparsifierChoice {
    fn name(&self) -> &'static str {
        match self {
            SparsifierChoice::Default { .. } => "default",
            SparsifierChoice::Identity => "identity",
            SparsifierChoice::None => "none",
        }
    }

    fn sparsify(&self, h: &WeightedGraph, p: f64, rng: &mut ChaCha8Rng) -> WeightedGraph {
        match *self {
            SparsifierChoice::Default { q } => StretchSampler { q }.sparsify(h, p, rng),
            SparsifierChoice::Identity => IdentitySparsifier.sparsify(h, p, rng),
            SparsifierChoice::None => EmptySparsifier.sparsify(h, p, rng),
        }
    }
}

impl std::str::FromStr for SparsifierChoice {
    type Err = SddError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(SparsifierChoice::default()),
            "identity" => Ok(SparsifierChoice::Identity),
            "none" => Ok(SparsifierChoice::None),
            other => Err(SddError::OutOfRange(format!("unknown sparsifier '{other}'"))),
        }
    }
}

/// Plugin registry by name: `default`, `identity`, `none`.
pub fn sparsifier_by_name(name: &str) -> Result<Box<dyn Sparsifier>> {
    match name {
        "default" => Ok(Box::new(StretchSampler::default())),
        "identity" => Ok(Box::new(IdentitySparsifier)),
        "none" => Ok(Box::new(EmptySparsifier)),
        other => Err(SddError::OutOfRange(format!("unknown sparsifier '{other}'"))),
    }
}

/// Checks the support and reweighting conditions of the plugin contract.
pub fn check_contract(h: &WeightedGraph, hs: &WeightedGraph) -> Result<()> {
    if hs.n() != h.n() {
        return Err(SddError::DimensionMismatch { expected: h.n(), got: hs.n() });
    }
    let mut sum = vec![0.0; h.n()];
    for e in hs.edges() {
        let id = h
            .find_edge(e.u, e.v)
            .ok_or_else(|| SddError::Precondition(format!("edge ({}, {}) not in the input", e.u, e.v)))?;
        let r = e.w / h.edges()[id].w;
        sum[e.u] += r;
        sum[e.v] += r;
    }
    for v in 0..h.n() {
        if sum[v] > 2.0 * h.degree(v) as f64 * (1.0 + 1e-12) {
            return Err(SddError::Precondition(format!("vertex {v} reweighted beyond twice its degree")));
        }
    }
    Ok(())
}
