//! Spanning trees: construction strategies, splitters, path resistances
//! and per-edge stretch.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Result, SddError};
use crate::graph::{connected_components, DisjointSet, Edge, WeightedGraph};

/// How [`build_tree`] picks the spanning tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum TreeStrategy {
    /// Maximum-weight spanning tree (Kruskal).
    MaxWeightSpanning,
    /// Shortest-path tree in the resistance metric, rooted at a splitter of
    /// the maximum-weight tree.
    ShortestPathByResistance,
    /// Iterated ball-growing cluster contraction over length classes; falls
    /// back to the shortest-path tree when that has smaller total stretch.
    #[default]
    ClusterLowStretch,
}

impl std::str::FromStr for TreeStrategy {
    type Err = SddError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-weight" | "mst" => Ok(TreeStrategy::MaxWeightSpanning),
            "shortest-path" | "spt" => Ok(TreeStrategy::ShortestPathByResistance),
            "cluster" | "low-stretch" => Ok(TreeStrategy::ClusterLowStretch),
            other => Err(SddError::OutOfRange(format!("unknown tree strategy '{other}'"))),
        }
    }
}

/// A rooted spanning tree with per-vertex parent edge weights.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    root: usize,
    parent: Vec<usize>,
    parent_weight: Vec<f64>,
    depth: Vec<usize>,
    res_to_root: Vec<f64>,
    order: Vec<usize>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl SpanningTree {
    /// Builds a rooted tree from `n - 1` edges spanning `0..n`.
    pub fn from_edges(n: usize, edges: &[Edge], root: usize) -> Result<Self> {
        if n == 0 {
            return Err(SddError::Precondition("empty vertex set".into()));
        }
        if edges.len() + 1 != n {
            return Err(SddError::Precondition(format!("{} edges cannot span {} vertices as a tree", edges.len(), n)));
        }
        let mut adj = vec![Vec::new(); n];
        for e in edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        for a in &mut adj {
            a.sort_by_key(|x| x.0);
        }
        Self::from_adjacency(adj, root)
    }

    fn from_adjacency(adj: Vec<Vec<(usize, f64)>>, root: usize) -> Result<Self> {
        let n = adj.len();
        let mut parent = vec![usize::MAX; n];
        let mut parent_weight = vec![0.0; n];
        let mut depth = vec![0; n];
        let mut acc = vec![Neumaier::default(); n];
        let mut order = Vec::with_capacity(n);
        parent[root] = root;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(u, w) in &adj[v] {
                if parent[u] == usize::MAX {
                    parent[u] = v;
                    parent_weight[u] = w;
                    depth[u] = depth[v] + 1;
                    let mut a = acc[v];
                    a.add(1.0 / w);
                    acc[u] = a;
                    order.push(u);
                }
            }
        }
        if order.len() != n {
            return Err(SddError::Precondition("tree edges do not span the vertex set".into()));
        }
        let res_to_root = acc.iter().map(|a| a.value()).collect();
        Ok(SpanningTree { root, parent, parent_weight, depth, res_to_root, order, adj })
    }

    /// Same tree, rooted elsewhere.
    pub fn rerooted(&self, root: usize) -> SpanningTree {
        Self::from_adjacency(self.adj.clone(), root).expect("rerooting a valid tree")
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Parent of `v`; the root is its own parent.
    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn parent_weight(&self, v: usize) -> f64 {
        self.parent_weight[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Resistance of the tree path from `v` to the root.
    pub fn resistance_to_root(&self, v: usize) -> f64 {
        self.res_to_root[v]
    }

    /// Vertices in breadth-first order from the root.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Tree neighbors of `v` with edge weights, sorted by id.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub(crate) fn adjacency(&self) -> &[Vec<(usize, f64)>] {
        &self.adj
    }

    /// Children of every vertex in ascending id order.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.n()];
        for v in 0..self.n() {
            if v != self.root {
                ch[self.parent[v]].push(v);
            }
        }
        ch
    }

    /// Whether `w<u, v>` is an edge of the tree with exactly this weight.
    pub fn has_edge(&self, u: usize, v: usize, w: f64) -> bool {
        (self.parent[u] == v && u != self.root && self.parent_weight[u] == w)
            || (self.parent[v] == u && v != self.root && self.parent_weight[v] == w)
    }

    pub fn contains_pair(&self, u: usize, v: usize) -> bool {
        (self.parent[u] == v && u != self.root) || (self.parent[v] == u && v != self.root)
    }

    /// The `n - 1` tree edges, canonical and sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = (0..self.n())
            .filter(|&v| v != self.root)
            .map(|v| Edge::new(v, self.parent[v], self.parent_weight[v]))
            .collect();
        out.sort_by_key(|e| e.key());
        out
    }

    pub fn to_graph(&self) -> WeightedGraph {
        WeightedGraph::from_canonical(self.n(), self.edges())
    }
}

/// Compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Builds a spanning tree of a connected graph.
pub fn build_tree(g: &WeightedGraph, strategy: TreeStrategy) -> Result<SpanningTree> {
    let comps = connected_components(g);
    if comps.len() > 1 {
        return Err(SddError::Disconnected { components: comps.len() });
    }
    if g.n() == 0 {
        return Err(SddError::Precondition("empty graph".into()));
    }
    match strategy {
        TreeStrategy::MaxWeightSpanning => {
            let t = max_weight_tree(g);
            Ok(t.rerooted(find_splitter(&t)))
        }
        TreeStrategy::ShortestPathByResistance => Ok(shortest_path_tree(g)),
        TreeStrategy::ClusterLowStretch => {
            let cluster = cluster_tree(g);
            let cluster = cluster.rerooted(find_splitter(&cluster));
            if g.m() + 1 == g.n() {
                return Ok(cluster);
            }
            let spt = shortest_path_tree(g);
            let a = compute_stretch(&cluster, g.edges()).eta_total;
            let b = compute_stretch(&spt, g.edges()).eta_total;
            Ok(if b < a { spt } else { cluster })
        }
    }
}

fn max_weight_tree(g: &WeightedGraph) -> SpanningTree {
    let mut ids: Vec<usize> = (0..g.m()).collect();
    let e = g.edges();
    ids.sort_by(|&a, &b| e[b].w.total_cmp(&e[a].w).then(e[a].key().cmp(&e[b].key())));
    let mut dsu = DisjointSet::new(g.n());
    let mut chosen = Vec::with_capacity(g.n().saturating_sub(1));
    for id in ids {
        if dsu.union(e[id].u, e[id].v) {
            chosen.push(e[id]);
        }
    }
    SpanningTree::from_edges(g.n(), &chosen, 0).expect("Kruskal on a connected graph")
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn shortest_path_tree(g: &WeightedGraph) -> SpanningTree {
    let root = find_splitter(&max_weight_tree(g));
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut via = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(HeapItem(0.0, root));
    while let Some(HeapItem(d, v)) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &(u, id) in g.neighbors(v) {
            let nd = d + g.edges()[id].resistance();
            if nd < dist[u] {
                dist[u] = nd;
                via[u] = id;
                heap.push(HeapItem(nd, u));
            }
        }
    }
    let edges: Vec<Edge> = (0..n).filter(|&v| v != root).map(|v| g.edges()[via[v]]).collect();
    SpanningTree::from_edges(n, &edges, root).expect("Dijkstra on a connected graph")
}

/// Ball-growing cluster contraction in the style of Alon-Karp-Peleg-West.
///
/// Edges are bucketed into geometric length classes. Stage `j` grows BFS
/// balls over the current clusters using edges of class `<= j`, stopping a
/// ball once its boundary is at most `1/x` of its interior, and contracts
/// each ball into one cluster through its BFS edges.
fn cluster_tree(g: &WeightedGraph) -> SpanningTree {
    let n = g.n();
    let edges = g.edges();
    let lmin = edges.iter().map(|e| e.resistance()).fold(f64::INFINITY, f64::min);
    let base: f64 = 4.0;
    let class: Vec<usize> = edges
        .iter()
        .map(|e| ((e.resistance() / lmin).ln() / base.ln()).floor().max(0.0) as usize)
        .collect();
    let max_class = class.iter().copied().max().unwrap_or(0);
    let x = (n as f64).ln().max(2.0);

    // edges ordered by length so BFS discovery prefers short edges
    let mut by_len: Vec<usize> = (0..edges.len()).collect();
    by_len.sort_by(|&a, &b| edges[a].resistance().total_cmp(&edges[b].resistance()).then(a.cmp(&b)));

    let mut dsu = DisjointSet::new(n);
    let mut clusters = n;
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    let mut stage = 0usize;
    while clusters > 1 {
        let limit = stage.min(max_class);
        stage += 1;
        // contracted multigraph on cluster representatives
        let mut cid = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for v in 0..n {
            let r = dsu.find(v);
            if cid[r] == usize::MAX {
                cid[r] = reps.len();
                reps.push(r);
            }
        }
        let k = reps.len();
        let mut cadj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
        for &id in &by_len {
            if class[id] > limit {
                continue;
            }
            let (a, b) = (cid[dsu.find(edges[id].u)], cid[dsu.find(edges[id].v)]);
            if a != b {
                cadj[a].push((b, id));
                cadj[b].push((a, id));
            }
        }
        if cadj.iter().all(|a| a.is_empty()) {
            continue;
        }
        let mut assigned = vec![false; k];
        let mut in_ball = vec![false; k];
        for c in 0..k {
            if assigned[c] || cadj[c].is_empty() {
                continue;
            }
            let mut ball = vec![c];
            let mut layer = vec![c];
            in_ball[c] = true;
            let (mut inside, mut out) = (0usize, 0usize);
            for &(d, _) in &cadj[c] {
                if !assigned[d] && !in_ball[d] {
                    out += 1;
                }
            }
            loop {
                if out == 0 || (inside > 0 && (out as f64) <= inside as f64 / x) {
                    break;
                }
                let mut next = Vec::new();
                for &a in &layer {
                    for &(d, id) in &cadj[a] {
                        if assigned[d] || in_ball[d] {
                            continue;
                        }
                        in_ball[d] = true;
                        tree.push(edges[id]);
                        next.push(d);
                        for &(e, _) in &cadj[d] {
                            if in_ball[e] {
                                inside += 1;
                                out -= 1;
                            } else if !assigned[e] {
                                out += 1;
                            }
                        }
                    }
                }
                if next.is_empty() {
                    break;
                }
                ball.extend_from_slice(&next);
                layer = next;
            }
            for &b in &ball {
                assigned[b] = true;
                in_ball[b] = false;
                if b != c {
                    dsu.union(reps[c], reps[b]);
                    clusters -= 1;
                }
            }
        }
    }
    SpanningTree::from_edges(n, &tree, 0).expect("cluster contraction yields a spanning tree")
}

/// Scratch-backed centroid search over the forest left after removing
/// vertices marked in `removed`.
pub(crate) struct Centroids<'a> {
    adj: &'a [Vec<(usize, f64)>],
    pub removed: Vec<bool>,
    parent: Vec<usize>,
    size: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> Centroids<'a> {
    pub fn new(adj: &'a [Vec<(usize, f64)>]) -> Self {
        let n = adj.len();
        Centroids { adj, removed: vec![false; n], parent: vec![usize::MAX; n], size: vec![0; n], order: Vec::new() }
    }

    /// Returns a splitter of the component containing `start` together with
    /// the component's vertex list.
    pub fn find(&mut self, start: usize) -> (usize, Vec<usize>) {
        self.order.clear();
        self.order.push(start);
        self.parent[start] = usize::MAX;
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            for &(u, _) in &self.adj[v] {
                if !self.removed[u] && u != self.parent[v] {
                    self.parent[u] = v;
                    self.order.push(u);
                }
            }
        }
        let total = self.order.len();
        for &v in self.order.iter().rev() {
            self.size[v] = 1;
        }
        for i in (1..total).rev() {
            let v = self.order[i];
            let p = self.parent[v];
            self.size[p] += self.size[v];
        }
        let mut best = start;
        for &v in &self.order {
            let mut largest = total - self.size[v];
            for &(u, _) in &self.adj[v] {
                if !self.removed[u] && u != self.parent[v] {
                    largest = largest.max(self.size[u]);
                }
            }
            if 2 * largest <= total {
                best = v;
                break;
            }
        }
        (best, self.order.clone())
    }
}

/// A vertex whose removal leaves components of at most half the vertices.
pub fn find_splitter(t: &SpanningTree) -> usize {
    Centroids::new(t.adjacency()).find(t.root()).0
}

/// Resistance of the tree path between `u` and `v`.
pub fn path_resistance(t: &SpanningTree, mut u: usize, mut v: usize) -> f64 {
    let mut acc = Neumaier::default();
    while t.depth(u) > t.depth(v) {
        acc.add(1.0 / t.parent_weight(u));
        u = t.parent(u);
    }
    while t.depth(v) > t.depth(u) {
        acc.add(1.0 / t.parent_weight(v));
        v = t.parent(v);
    }
    while u != v {
        acc.add(1.0 / t.parent_weight(u));
        acc.add(1.0 / t.parent_weight(v));
        u = t.parent(u);
        v = t.parent(v);
    }
    acc.value()
}

/// Per-edge stretch and `eta = max(stretch, 1)` for an edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchTable {
    pub stretch: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_total: f64,
}

impl StretchTable {
    pub fn from_stretch(stretch: Vec<f64>) -> Self {
        let (eta, eta_total) = eta_of(&stretch);
        StretchTable { stretch, eta, eta_total }
    }

    /// Total stretch `sum_e stretch(e)`.
    pub fn total_stretch(&self) -> f64 {
        self.stretch.iter().sum()
    }
}

/// `eta(e) = max(stretch(e), 1)` and its total.
pub fn eta_of(stretch: &[f64]) -> (Vec<f64>, f64) {
    let eta: Vec<f64> = stretch.iter().map(|&s| s.max(1.0)).collect();
    let total = eta.iter().sum();
    (eta, total)
}

/// Stretch of every edge in `edges` with respect to `t`.
///
/// Repeatedly picks a splitter `r` of the current subtree, measures the
/// resistance from `r` to every vertex of the subtree, resolves all edges
/// whose tree path passes through `r`, and hands the rest to the subtree
/// holding both endpoints. Edges of the tree itself get stretch exactly 1.
pub fn compute_stretch(t: &SpanningTree, edges: &[Edge]) -> StretchTable {
    let n = t.n();
    let mut stretch = vec![0.0; edges.len()];
    let mut pending = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        if t.has_edge(e.u, e.v, e.w) {
            stretch[i] = 1.0;
        } else {
            pending.push(i);
        }
    }
    let mut cent = Centroids::new(t.adjacency());
    let mut dist = vec![Neumaier::default(); n];
    let mut branch = vec![usize::MAX; n];
    let mut stack: Vec<(usize, Vec<usize>)> = Vec::new();
    if !pending.is_empty() {
        stack.push((t.root(), pending));
    }
    while let Some((start, ids)) = stack.pop() {
        let (r, _) = cent.find(start);
        let nbrs = distances_from(t.adjacency(), &cent.removed, r, &mut dist, &mut branch);
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); nbrs.len()];
        for id in ids {
            let e = &edges[id];
            if e.u == r || e.v == r || branch[e.u] != branch[e.v] {
                stretch[id] = e.w * (dist[e.u].value() + dist[e.v].value());
            } else {
                buckets[branch[e.u]].push(id);
            }
        }
        cent.removed[r] = true;
        for (b, ids) in buckets.into_iter().enumerate() {
            if !ids.is_empty() {
                stack.push((nbrs[b], ids));
            }
        }
    }
    StretchTable::from_stretch(stretch)
}

/// Resistance from `r` and branch index (position of the first vertex after
/// `r` in the returned neighbor list) for every vertex in `r`'s component.
fn distances_from(
    adj: &[Vec<(usize, f64)>],
    removed: &[bool],
    r: usize,
    dist: &mut [Neumaier],
    branch: &mut [usize],
) -> Vec<usize> {
    let mut nbrs = Vec::new();
    dist[r] = Neumaier::default();
    branch[r] = usize::MAX;
    let mut stack = Vec::new();
    for &(u, w) in &adj[r] {
        if removed[u] {
            continue;
        }
        let b = nbrs.len();
        nbrs.push(u);
        let mut d = Neumaier::default();
        d.add(1.0 / w);
        dist[u] = d;
        branch[u] = b;
        stack.push((u, r));
        while let Some((v, from)) = stack.pop() {
            for &(x, wx) in &adj[v] {
                if x != from && !removed[x] {
                    let mut d = dist[v];
                    d.add(1.0 / wx);
                    dist[x] = d;
                    branch[x] = b;
                    stack.push((x, v));
                }
            }
        }
    }
    nbrs
}

/// Labels every vertex of `r`'s component (minus `removed`) with the index
/// of the neighbor of `r` through which it is reached; returns those
/// neighbors. `r` itself gets `usize::MAX`.
pub(crate) fn branches_from(adj: &[Vec<(usize, f64)>], removed: &[bool], r: usize, branch: &mut [usize]) -> Vec<usize> {
    let mut nbrs = Vec::new();
    branch[r] = usize::MAX;
    let mut stack = Vec::new();
    for &(u, _) in &adj[r] {
        if removed[u] {
            continue;
        }
        let b = nbrs.len();
        nbrs.push(u);
        branch[u] = b;
        stack.push((u, r));
        while let Some((v, from)) = stack.pop() {
            for &(x, _) in &adj[v] {
                if x != from && !removed[x] {
                    branch[x] = b;
                    stack.push((x, v));
                }
            }
        }
    }
    nbrs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(weights: &[f64]) -> WeightedGraph {
        WeightedGraph::from_edges(weights.len() + 1, weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w))).unwrap()
    }

    fn grid(k: usize) -> WeightedGraph {
        let mut e = Vec::new();
        for r in 0..k {
            for c in 0..k {
                let v = r * k + c;
                if c + 1 < k {
                    e.push((v, v + 1, 1.0));
                }
                if r + 1 < k {
                    e.push((v, v + k, 1.0));
                }
            }
        }
        WeightedGraph::from_edges(k * k, e).unwrap()
    }

    const ALL: [TreeStrategy; 3] =
        [TreeStrategy::MaxWeightSpanning, TreeStrategy::ShortestPathByResistance, TreeStrategy::ClusterLowStretch];

    #[test]
    fn max_weight_triangle() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 3.0), (1, 2, 2.0), (0, 2, 1.0)]).unwrap();
        let t = build_tree(&g, TreeStrategy::MaxWeightSpanning).unwrap();
        let ws: Vec<f64> = t.edges().iter().map(|e| e.w).collect();
        assert_eq!(ws.len(), 2);
        assert!(ws.contains(&3.0) && ws.contains(&2.0));
    }

    #[test]
    fn tree_input_returns_itself() {
        let g = path(&[1.0, 2.0, 4.0, 0.5]);
        for s in ALL {
            let t = build_tree(&g, s).unwrap();
            assert_eq!(t.edges(), g.edges().to_vec());
        }
    }

    #[test]
    fn grid_trees_have_n_minus_one_edges() {
        let g = grid(3);
        for s in ALL {
            let t = build_tree(&g, s).unwrap();
            assert_eq!(t.edges().len(), 8);
            assert_eq!(t.order().len(), 9);
            for e in t.edges() {
                let id = g.find_edge(e.u, e.v).expect("tree edge in graph");
                assert_eq!(g.edges()[id].w, e.w);
            }
        }
    }

    #[test]
    fn disconnected_rejected() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(build_tree(&g, TreeStrategy::ClusterLowStretch), Err(SddError::Disconnected { .. })));
    }

    #[test]
    fn splitter_examples() {
        let t = build_tree(&path(&[1.0, 1.0]), TreeStrategy::MaxWeightSpanning).unwrap();
        assert_eq!(find_splitter(&t), 1);
        let star = WeightedGraph::from_edges(6, (1..6).map(|i| (0, i, 1.0))).unwrap();
        let t = build_tree(&star, TreeStrategy::MaxWeightSpanning).unwrap();
        assert_eq!(find_splitter(&t), 0);
        let t = SpanningTree::from_edges(9, path(&[1.0; 8]).edges(), 0).unwrap();
        assert_eq!(find_splitter(&t), 4);
        let single = SpanningTree::from_edges(1, &[], 0).unwrap();
        assert_eq!(find_splitter(&single), 0);
    }

    #[test]
    fn path_resistance_examples() {
        let t = SpanningTree::from_edges(4, path(&[1.0, 2.0, 4.0]).edges(), 0).unwrap();
        assert_eq!(path_resistance(&t, 0, 3), 1.75);
        assert_eq!(path_resistance(&t, 3, 0), 1.75);
        assert_eq!(path_resistance(&t, 2, 2), 0.0);
        assert_eq!(path_resistance(&t, 1, 2), 0.5);
    }

    #[test]
    fn stretch_examples() {
        let t = SpanningTree::from_edges(3, &[Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)], 0).unwrap();
        let s = compute_stretch(&t, &[Edge::new(0, 2, 1.0), Edge::new(0, 1, 1.0)]);
        assert_eq!(s.stretch, vec![2.0, 1.0]);

        let t = SpanningTree::from_edges(3, &[Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)], 2).unwrap();
        let s = compute_stretch(&t, &[Edge::new(0, 2, 2.0)]);
        assert_eq!(s.stretch, vec![3.0]);
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_of(&[0.25]).0, vec![1.0]);
        assert_eq!(eta_of(&[3.0]).0, vec![3.0]);
        let g = path(&[1.0, 5.0, 0.3]);
        let t = build_tree(&g, TreeStrategy::ClusterLowStretch).unwrap();
        let s = compute_stretch(&t, g.edges());
        assert_eq!(s.eta_total, 3.0);
    }

    #[test]
    fn splitter_exhaustive_small_trees() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=50 {
            let edges: Vec<Edge> = (1..n).map(|v| Edge::new(v, rng.random_range(0..v), 1.0)).collect();
            let t = SpanningTree::from_edges(n, &edges, 0).unwrap();
            let r = find_splitter(&t);
            // component sizes after removing r
            let mut seen = vec![false; n];
            seen[r] = true;
            for &(s, _) in t.neighbors(r) {
                let mut stack = vec![s];
                seen[s] = true;
                let mut size = 0;
                while let Some(v) = stack.pop() {
                    size += 1;
                    for &(u, _) in t.neighbors(v) {
                        if !seen[u] {
                            seen[u] = true;
                            stack.push(u);
                        }
                    }
                }
                if n >= 3 {
                    assert!(3 * size <= 2 * n, "n={n} size={size}");
                }
            }
        }
    }
}
