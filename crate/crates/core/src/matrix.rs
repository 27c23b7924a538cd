//! Symmetric sparse matrices, SDD classification, the Laplacian split and
//! Gremban's doubling reduction.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Result, SddError};
use crate::graph::{DisjointSet, WeightedGraph};

/// Relative tolerance of the weak diagonal dominance test.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Symmetric sparse matrix stored as a diagonal plus the strict upper
/// triangle `(i, j, a_ij)` with `i < j`, sorted and without zeros. A full
/// CSR copy of the off-diagonal part backs [`SparseSymMatrix::apply`].
#[derive(Debug, Clone)]
pub struct SparseSymMatrix {
    n: usize,
    diag: Vec<f64>,
    off: Vec<(usize, usize, f64)>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl PartialEq for SparseSymMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.diag() == other.diag() && self.off_diagonal() == other.off_diagonal()
    }
}

impl SparseSymMatrix {
    /// `off` must hold `i < j`, sorted, unique, nonzero entries.
    pub(crate) fn from_canonical(n: usize, diag: Vec<f64>, off: Vec<(usize, usize, f64)>) -> Self {
        debug_assert_eq!(diag.len(), n);
        debug_assert!(off.iter().all(|&(i, j, _)| i < j && j < n));
        let mut cnt = vec![0usize; n + 1];
        for &(i, j, _) in &off {
            cnt[i + 1] += 1;
            cnt[j + 1] += 1;
        }
        for i in 0..n {
            cnt[i + 1] += cnt[i];
        }
        let row_ptr = cnt;
        let mut fill = row_ptr.clone();
        let mut cols = vec![0; 2 * off.len()];
        let mut vals = vec![0.0; 2 * off.len()];
        for &(i, j, a) in &off {
            cols[fill[i]] = j;
            vals[fill[i]] = a;
            fill[i] += 1;
            cols[fill[j]] = i;
            vals[fill[j]] = a;
            fill[j] += 1;
        }
        SparseSymMatrix { n, diag, off, row_ptr, cols, vals }
    }

    /// Builds a matrix from upper-or-lower triangle triples; entries landing
    /// on the same position are summed and explicit zeros are dropped.
    pub fn from_triplets(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut diag = vec![0.0; n];
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, a) in entries {
            if i >= n || j >= n {
                return Err(SddError::InvalidEdge { u: i, v: j, reason: format!("index out of range 0..{n}") });
            }
            if !a.is_finite() {
                return Err(SddError::InvalidEdge { u: i, v: j, reason: "non-finite entry".into() });
            }
            if i == j {
                diag[i] += a;
            } else {
                *map.entry((i.min(j), i.max(j))).or_insert(0.0) += a;
            }
        }
        let off = map.into_iter().filter(|&(_, a)| a != 0.0).map(|((i, j), a)| (i, j, a)).collect();
        Ok(Self::from_canonical(n, diag, off))
    }

    /// Builds a matrix from a full (both triangles) coordinate list, checking
    /// that `(i, j)` and `(j, i)` carry equal values.
    pub fn from_full_triplets(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut full: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, a) in entries {
            if i >= n || j >= n {
                return Err(SddError::InvalidEdge { u: i, v: j, reason: format!("index out of range 0..{n}") });
            }
            *full.entry((i, j)).or_insert(0.0) += a;
        }
        for (&(i, j), &a) in &full {
            if i < j {
                let b = full.get(&(j, i)).copied().unwrap_or(0.0);
                if a != b {
                    return Err(SddError::Classification {
                        expected: "symmetric",
                        found: format!("asymmetric entry ({}, {}): {} vs {}", i + 1, j + 1, a, b),
                    });
                }
            } else if i > j && !full.contains_key(&(j, i)) && a != 0.0 {
                return Err(SddError::Classification {
                    expected: "symmetric",
                    found: format!("asymmetric entry ({}, {}): 0 vs {}", j + 1, i + 1, a),
                });
            }
        }
        Self::from_triplets(n, full.into_iter().filter(|&((i, j), _)| i <= j).map(|((i, j), a)| (i, j, a)))
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let diag = (0..n).map(|i| a[(i, i)]).collect();
        let mut off = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if a[(i, j)] != 0.0 {
                    off.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::from_canonical(n, diag, off)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_canonical(n, vec![1.0; n], Vec::new())
    }

    pub fn diagonal(d: Vec<f64>) -> Self {
        let n = d.len();
        Self::from_canonical(n, d, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Strict upper triangle `(i, j, a_ij)`, `i < j`.
    pub fn off_diagonal(&self) -> &[(usize, usize, f64)] {
        &self.off
    }

    /// Number of nonzero entries in the strict upper triangle.
    pub fn noff(&self) -> usize {
        self.off.len()
    }

    /// Off-diagonal entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(SddError::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let mut y = vec![0.0; self.n];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` without allocation; panics on length mismatch.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut s = self.diag[i] * x[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    /// `x^T A x`.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        let mut s: f64 = self.diag.iter().zip(x).map(|(d, xi)| d * xi * xi).sum();
        for &(i, j, a) in &self.off {
            s += 2.0 * a * x[i] * x[j];
        }
        s
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            a[(i, i)] = self.diag[i];
        }
        for &(i, j, v) in &self.off {
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        a
    }

    /// Scale used by the dominance tolerance: the largest absolute diagonal.
    pub fn scale(&self) -> f64 {
        self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(f64::MIN_POSITIVE)
    }

    /// Per-row excess `a_ii - sum_j |a_ij|`.
    pub fn dominance_excess(&self) -> Vec<f64> {
        let mut ex = self.diag.clone();
        for &(i, j, a) in &self.off {
            ex[i] -= a.abs();
            ex[j] -= a.abs();
        }
        ex
    }

    /// Vertex partition by connectivity of the nonzero structure.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut dsu = DisjointSet::new(self.n);
        for &(i, j, _) in &self.off {
            dsu.union(i, j);
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut order = Vec::new();
        for v in 0..self.n {
            let r = dsu.find(v);
            let slot = by_root.entry(r).or_default();
            if slot.is_empty() {
                order.push(r);
            }
            slot.push(v);
        }
        order.into_iter().map(|r| by_root.remove(&r).unwrap()).collect()
    }

    pub fn is_irreducible(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn submatrix(&self, idx: &[usize]) -> SparseSymMatrix {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &v) in idx.iter().enumerate() {
            pos[v] = k;
        }
        let diag = idx.iter().map(|&v| self.diag[v]).collect();
        let mut off: Vec<(usize, usize, f64)> = self
            .off
            .iter()
            .filter(|&&(i, j, _)| pos[i] != usize::MAX && pos[j] != usize::MAX)
            .map(|&(i, j, a)| {
                let (p, q) = (pos[i], pos[j]);
                (p.min(q), p.max(q), a)
            })
            .collect();
        off.sort_by_key(|a| (a.0, a.1));
        SparseSymMatrix::from_canonical(idx.len(), diag, off)
    }

    /// Symmetric permutation `P^T A P`; entry `k` of the result corresponds
    /// to row `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> SparseSymMatrix {
        self.submatrix(perm)
    }

    /// Sum with a nonnegative diagonal.
    pub fn add_diagonal(&self, d: &[f64]) -> SparseSymMatrix {
        let diag = self.diag.iter().zip(d).map(|(a, b)| a + b).collect();
        SparseSymMatrix::from_canonical(self.n, diag, self.off.clone())
    }

    fn has_positive_off_diagonal(&self) -> bool {
        self.off.iter().any(|&(_, _, a)| a > 0.0)
    }
}

/// The SDD family a matrix belongs to, from most to least specific.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum MatrixKind {
    Laplacian,
    Sddm0,
    Sdd0,
    NotSdd,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixKind::Laplacian => "Laplacian",
            MatrixKind::Sddm0 => "SDDM0",
            MatrixKind::Sdd0 => "SDD0",
            MatrixKind::NotSdd => "not SDD",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MatrixClass {
    pub kind: MatrixKind,
    pub irreducible: bool,
    pub singular: bool,
}

impl MatrixClass {
    pub fn is_sddm0(&self) -> bool {
        self.kind <= MatrixKind::Sddm0
    }

    pub fn is_sdd0(&self) -> bool {
        self.kind <= MatrixKind::Sdd0
    }
}

/// Classifies `a` into the most specific SDD family.
///
/// The singular flag is exact for the SDD classes: a matrix in `SDD0` is
/// singular iff some irreducible block has every row tight and its sign
/// pattern is balanced, i.e. it is a Laplacian up to a diagonal `+-1`
/// similarity. For `NotSdd` inputs it is reported as `false`.
pub fn classify(a: &SparseSymMatrix) -> MatrixClass {
    let tol = DOMINANCE_TOL * a.scale();
    let excess = a.dominance_excess();
    let irreducible = a.is_irreducible();
    let dominant = a.diag().iter().all(|&d| d >= -tol) && excess.iter().all(|&e| e >= -tol);
    if !dominant {
        return MatrixClass { kind: MatrixKind::NotSdd, irreducible, singular: false };
    }
    let kind = if a.has_positive_off_diagonal() {
        MatrixKind::Sdd0
    } else if excess.iter().all(|&e| e.abs() <= tol) {
        MatrixKind::Laplacian
    } else {
        MatrixKind::Sddm0
    };
    let singular = match kind {
        MatrixKind::Laplacian => true,
        _ => has_singular_block(a, &excess, tol),
    };
    MatrixClass { kind, irreducible, singular }
}

fn has_singular_block(a: &SparseSymMatrix, excess: &[f64], tol: f64) -> bool {
    for comp in a.components() {
        if !comp.iter().all(|&v| excess[v].abs() <= tol) {
            continue;
        }
        // two-colour with s_i s_j a_ij <= 0 on every edge
        let mut sign = vec![0i8; a.n()];
        let mut balanced = true;
        let mut stack = vec![comp[0]];
        sign[comp[0]] = 1;
        while let Some(v) = stack.pop() {
            for (u, val) in a.row(v) {
                let want = if val > 0.0 { -sign[v] } else { sign[v] };
                if sign[u] == 0 {
                    sign[u] = want;
                    stack.push(u);
                } else if sign[u] != want {
                    balanced = false;
                }
            }
        }
        if balanced {
            return true;
        }
    }
    false
}

/// Splits an `SDDM0` matrix into a Laplacian `A_L` and a nonnegative
/// diagonal `A_D` with `A_L + A_D = A`. Excess values within the dominance
/// tolerance of zero are snapped to zero.
pub fn split_sddm(a: &SparseSymMatrix) -> Result<(SparseSymMatrix, Vec<f64>)> {
    let class = classify(a);
    if !class.is_sddm0() {
        return Err(SddError::Classification { expected: "SDDM0", found: class.kind.to_string() });
    }
    let tol = DOMINANCE_TOL * a.scale();
    let mut lap_diag = vec![0.0; a.n()];
    for &(i, j, v) in a.off_diagonal() {
        lap_diag[i] -= v;
        lap_diag[j] -= v;
    }
    let d: Vec<f64> = a
        .diag()
        .iter()
        .zip(&lap_diag)
        .map(|(&aii, &li)| {
            let e = aii - li;
            if e.abs() <= tol {
                0.0
            } else {
                e
            }
        })
        .collect();
    Ok((SparseSymMatrix::from_canonical(a.n(), lap_diag, a.off_diagonal().to_vec()), d))
}

/// The weighted graph of a matrix's off-diagonal part, weights `-a_ij`.
/// Only meaningful for `SDDM0` matrices.
pub fn graph_of(a: &SparseSymMatrix) -> WeightedGraph {
    let edges = a.off_diagonal().iter().map(|&(i, j, v)| crate::graph::Edge { u: i, v: j, w: -v }).collect();
    WeightedGraph::from_canonical(a.n(), edges)
}

/// Gremban's reduction of an `SDD0` system to an `SDDM0` system of twice
/// the size: `[[D + A_n, -A_p], [-A_p, D + A_n]]` with right-hand side
/// `(b, -b)`.
pub fn gremban_reduce(a: &SparseSymMatrix, b: &[f64]) -> Result<(SparseSymMatrix, Vec<f64>)> {
    let class = classify(a);
    if !class.is_sdd0() {
        return Err(SddError::Classification { expected: "SDD0", found: class.kind.to_string() });
    }
    let n = a.n();
    if b.len() != n {
        return Err(SddError::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut diag = a.diag().to_vec();
    diag.extend_from_slice(a.diag());
    let mut off = Vec::with_capacity(2 * a.noff());
    for &(i, j, v) in a.off_diagonal() {
        if v < 0.0 {
            off.push((i, j, v));
            off.push((n + i, n + j, v));
        } else {
            off.push((i, n + j, -v));
            off.push((j, n + i, -v));
        }
    }
    off.sort_by_key(|x| (x.0, x.1));
    let mut bh = b.to_vec();
    bh.extend(b.iter().map(|x| -x));
    Ok((SparseSymMatrix::from_canonical(2 * n, diag, off), bh))
}

/// Recovers `x = (x_1 - x_2) / 2` from a solution of the doubled system.
pub fn gremban_recover(xh: &[f64]) -> Result<Vec<f64>> {
    if !xh.len().is_multiple_of(2) {
        return Err(SddError::OutOfRange(format!("odd length {}", xh.len())));
    }
    let n = xh.len() / 2;
    Ok((0..n).map(|i| (xh[i] - xh[n + i]) / 2.0).collect())
}
