//! Tree decompositions: cover the vertices of a tree by subtrees overlapping
//! in at most one vertex, with every edge of `E` mapped to one or two of
//! them, so that no non-singleton piece carries more than `4/t` of the total
//! `eta` mass.

use crate::error::{Result, SddError};
use crate::graph::Edge;
use crate::tree::SpanningTree;

const NONE: usize = usize::MAX;

/// Sets `W_1..W_h` and the edge map `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeDecomposition {
    pub sets: Vec<Vec<usize>>,
    rho: Vec<[usize; 2]>,
    /// Mass threshold `phi = 2 * sum(eta) / t` used while forming sets.
    pub phi: f64,
}

impl TreeDecomposition {
    /// Assembles a decomposition from explicit parts; each `rho` entry must
    /// name one or two sets.
    pub fn from_parts(sets: Vec<Vec<usize>>, rho: &[Vec<usize>], phi: f64) -> Result<Self> {
        let mut packed = Vec::with_capacity(rho.len());
        for r in rho {
            match *r.as_slice() {
                [a] if a < sets.len() => packed.push([a, NONE]),
                [a, b] if a < sets.len() && b < sets.len() => packed.push([a, b]),
                _ => return Err(SddError::Precondition(format!("invalid edge map entry {r:?}"))),
            }
        }
        Ok(TreeDecomposition { sets, rho: packed, phi })
    }

    pub fn h(&self) -> usize {
        self.sets.len()
    }

    /// Indices of the set(s) edge `e` is mapped to; one or two entries.
    pub fn rho(&self, e: usize) -> &[usize] {
        let r = &self.rho[e];
        if r[1] == NONE {
            &r[..1]
        } else {
            &r[..]
        }
    }

    pub fn num_edges(&self) -> usize {
        self.rho.len()
    }
}

/// Decomposes `t` rooted at its stored root.
///
/// Requires `1 < t <= sum(eta)` and nonnegative `eta`. Yields at most
/// `ceil(t)` sets; the root may end up alone in a trailing singleton.
pub fn decompose(t: &SpanningTree, edges: &[Edge], eta: &[f64], budget: f64) -> Result<TreeDecomposition> {
    if eta.len() != edges.len() {
        return Err(SddError::DimensionMismatch { expected: edges.len(), got: eta.len() });
    }
    if eta.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(SddError::Precondition("eta must be finite and nonnegative".into()));
    }
    let total: f64 = eta.iter().sum();
    if !(budget > 1.0 && budget <= total) {
        return Err(SddError::OutOfRange(format!("t = {budget} must satisfy 1 < t <= {total}")));
    }
    Ok(decompose_in(t.adjacency(), &vec![false; t.n()], t.root(), edges, eta, budget))
}

/// Core traversal on the component of `root` in the forest `adj` minus
/// `removed`. Every edge endpoint must lie in that component. Accepts any
/// `budget >= 1`.
pub(crate) fn decompose_in(
    adj: &[Vec<(usize, f64)>],
    removed: &[bool],
    root: usize,
    edges: &[Edge],
    eta: &[f64],
    budget: f64,
) -> TreeDecomposition {
    let n = adj.len();
    let total: f64 = eta.iter().sum();
    // w >= phi  <=>  w * t >= 2 * total, exact for integer-valued eta
    let two_total = 2.0 * total;
    let reaches = |w: f64| w * budget >= two_total;
    let exceeds_twice = |w: f64| w * budget > 2.0 * two_total;

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        incident[e.u].push(i);
        incident[e.v].push(i);
    }

    let mut b = Builder { sets: Vec::new(), rho: vec![[NONE, NONE]; edges.len()] };

    struct Frame {
        v: usize,
        parent: usize,
        next: usize,
        f: Vec<usize>,
        w: f64,
        u: Vec<usize>,
    }
    let frame = |v, parent| Frame { v, parent, next: 0, f: Vec::new(), w: 0.0, u: Vec::new() };

    let mut stack = vec![frame(root, NONE)];
    let mut result: (Vec<usize>, f64, Vec<usize>) = (Vec::new(), 0.0, Vec::new());
    while let Some(top) = stack.last_mut() {
        // descend into the next child, ascending by id
        let mut child = None;
        while top.next < adj[top.v].len() {
            let (c, _) = adj[top.v][top.next];
            top.next += 1;
            if c != top.parent && !removed[c] {
                child = Some(c);
                break;
            }
        }
        if let Some(c) = child {
            let v = top.v;
            stack.push(frame(c, v));
            continue;
        }

        // all children merged: steps 4-8
        let Frame { v, mut f, w, mut u, .. } = stack.pop().unwrap();
        let fv = &incident[v];
        let wv: f64 = fv.iter().map(|&e| eta[e]).sum();
        let out = if exceeds_twice(wv + w) {
            if !u.is_empty() {
                b.form(u, &f);
            }
            b.form(vec![v], fv);
            (Vec::new(), 0.0, Vec::new())
        } else if reaches(wv + w) {
            u.push(v);
            f.extend_from_slice(fv);
            b.form(u, &f);
            (Vec::new(), 0.0, Vec::new())
        } else {
            u.push(v);
            f.extend_from_slice(fv);
            (f, w + wv, u)
        };

        match stack.last_mut() {
            None => result = out,
            Some(p) => {
                let (cf, cw, cu) = out;
                merge(&mut p.f, cf);
                merge(&mut p.u, cu);
                p.w += cw;
                if reaches(p.w) {
                    let mut set = std::mem::take(&mut p.u);
                    set.push(p.v);
                    let fs = std::mem::take(&mut p.f);
                    b.form(set, &fs);
                    p.w = 0.0;
                }
            }
        }
    }

    let (f, _, u) = result;
    if !u.is_empty() {
        b.form(u, &f);
    }
    TreeDecomposition { sets: b.sets, rho: b.rho, phi: two_total / budget }
}

fn merge(into: &mut Vec<usize>, mut from: Vec<usize>) {
    if into.len() < from.len() {
        std::mem::swap(into, &mut from);
    }
    into.extend_from_slice(&from);
}

struct Builder {
    sets: Vec<Vec<usize>>,
    rho: Vec<[usize; 2]>,
}

impl Builder {
    fn form(&mut self, mut set: Vec<usize>, assigned: &[usize]) {
        let id = self.sets.len();
        set.sort_unstable();
        set.dedup();
        self.sets.push(set);
        for &e in assigned {
            let r = &mut self.rho[e];
            if r[0] == NONE {
                r[0] = id;
            } else if r[0] != id && r[1] != id {
                debug_assert_eq!(r[1], NONE, "edge mapped to more than two sets");
                r[1] = id;
            }
        }
    }
}
