//! Partial Cholesky elimination of low-degree rows and exact factorization
//! of small base matrices, with pseudo-inverse application by substitution.
//!
//! Both factor shapes use the convention that `L` carries the square roots
//! of the pivots, so the middle factor is the identity except for a single
//! zero in the last slot when the matrix is a singular Laplacian.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Result, SddError};
use crate::matrix::{classify, MatrixKind, SparseSymMatrix};
use crate::operator::{project_out_ones, LinearOperator};

/// Relative size below which a pivot counts as zero.
pub const PIVOT_TOL: f64 = 1e-12;

/// `B = P L diag(I, A_1) L^T P^T` after eliminating every row with at most
/// two off-diagonal nonzeros.
#[derive(Debug, Clone)]
pub struct PartialCholFactor {
    n: usize,
    /// `perm[k]` is the original index placed at position `k`; eliminated
    /// vertices come first, in elimination order.
    perm: Vec<usize>,
    eliminated: usize,
    /// Pivot square roots of the eliminated columns.
    pivots: Vec<f64>,
    /// Below-diagonal entries of each eliminated column as `(position, value)`.
    cols: Vec<Vec<(usize, f64)>>,
    /// Whether the last eliminated pivot was zero (singular, fully eliminated).
    zero_last: bool,
    reduced: SparseSymMatrix,
    projection: bool,
}

impl PartialCholFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn eliminated_count(&self) -> usize {
        self.eliminated
    }

    /// The Schur complement `A_1` on the vertices `perm[eliminated..]`.
    pub fn reduced(&self) -> &SparseSymMatrix {
        &self.reduced
    }

    /// Whether applications project orthogonally to the all-ones vector.
    pub fn projection(&self) -> bool {
        self.projection
    }

    /// Nonzeros of `L` including the diagonal (identity block counted).
    pub fn nnz_l(&self) -> usize {
        self.eliminated + self.cols.iter().map(|c| c.len()).sum::<usize>() + self.reduced.n()
    }

    /// Dense `L` in permuted coordinates; for tests.
    pub fn l_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut l = nalgebra::DMatrix::identity(self.n, self.n);
        for k in 0..self.eliminated {
            l[(k, k)] = self.pivots[k];
            for &(j, v) in &self.cols[k] {
                l[(j, k)] = v;
            }
        }
        l
    }

    /// `Pi P^{-T} L^{-T} diag(I, inner) L^{-1} P^{-1} Pi b`.
    pub fn apply_pinv(&self, inner: &dyn LinearOperator, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(SddError::DimensionMismatch { expected: self.n, got: b.len() });
        }
        if inner.dim() != self.reduced.n() {
            return Err(SddError::DimensionMismatch { expected: self.reduced.n(), got: inner.dim() });
        }
        let mut y = self.forward(b);
        let tail = y.split_off(self.eliminated);
        let mut z = vec![0.0; tail.len()];
        if !tail.is_empty() {
            inner.apply_into(&tail, &mut z);
        }
        y.extend_from_slice(&z);
        Ok(self.backward(y))
    }

    /// `L^{-1} P^{-1} Pi b`, with the zero slot cleared.
    pub(crate) fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut src = b.to_vec();
        if self.projection {
            project_out_ones(&mut src);
        }
        let mut y: Vec<f64> = self.perm.iter().map(|&v| src[v]).collect();
        for k in 0..self.eliminated {
            if self.zero_last && k + 1 == self.eliminated {
                y[k] = 0.0;
                continue;
            }
            y[k] /= self.pivots[k];
            let yk = y[k];
            for &(j, v) in &self.cols[k] {
                y[j] -= v * yk;
            }
        }
        y
    }

    /// `Pi P^{-T} L^{-T} y`.
    pub(crate) fn backward(&self, mut y: Vec<f64>) -> Vec<f64> {
        for k in (0..self.eliminated).rev() {
            if self.zero_last && k + 1 == self.eliminated {
                y[k] = 0.0;
                continue;
            }
            let mut s = y[k];
            for &(j, v) in &self.cols[k] {
                s -= v * y[j];
            }
            y[k] = s / self.pivots[k];
        }
        let mut x = vec![0.0; self.n];
        for (k, &v) in self.perm.iter().enumerate() {
            x[v] = y[k];
        }
        if self.projection {
            project_out_ones(&mut x);
        }
        x
    }
}

/// Eliminates rows with at most two off-diagonal nonzeros, FIFO, until none
/// remain. Requires an irreducible `SDDM0` matrix.
pub fn partial_cholesky(b: &SparseSymMatrix) -> Result<PartialCholFactor> {
    let class = classify(b);
    if !class.is_sddm0() {
        return Err(SddError::Classification { expected: "SDDM0", found: class.kind.to_string() });
    }
    if !class.irreducible {
        return Err(SddError::Reducible);
    }
    let n = b.n();
    let projection = class.kind == MatrixKind::Laplacian;
    let tol = PIVOT_TOL * b.scale();

    let mut diag = b.diag().to_vec();
    let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for &(i, j, a) in b.off_diagonal() {
        adj[i].insert(j, a);
        adj[j].insert(i, a);
    }

    let mut queued = vec![false; n];
    let mut done = vec![false; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if adj[v].len() <= 2 {
            queued[v] = true;
            queue.push_back(v);
        }
    }

    let mut order = Vec::new();
    let mut pivots = Vec::new();
    let mut raw_cols: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut zero_last = false;
    let mut remaining = n;
    while let Some(v) = queue.pop_front() {
        let nbrs: Vec<(usize, f64)> = adj[v].iter().map(|(&u, &a)| (u, a)).collect();
        let p = diag[v];
        if p <= tol {
            if remaining == 1 && nbrs.is_empty() && projection {
                order.push(v);
                pivots.push(1.0);
                raw_cols.push(Vec::new());
                done[v] = true;
                zero_last = true;
                remaining -= 1;
                continue;
            }
            return Err(SddError::Reducible);
        }
        let s = p.sqrt();
        let mut col = Vec::with_capacity(nbrs.len());
        for &(u, a) in &nbrs {
            col.push((u, a / s));
            adj[u].remove(&v);
            diag[u] -= a * a / p;
        }
        if let [(u1, a1), (u2, a2)] = nbrs[..] {
            *adj[u1].entry(u2).or_insert(0.0) -= a1 * a2 / p;
            *adj[u2].entry(u1).or_insert(0.0) -= a1 * a2 / p;
        }
        adj[v].clear();
        done[v] = true;
        remaining -= 1;
        order.push(v);
        pivots.push(s);
        raw_cols.push(col);
        for &(u, _) in &nbrs {
            if !queued[u] && adj[u].len() <= 2 {
                queued[u] = true;
                queue.push_back(u);
            }
        }
    }

    let eliminated = order.len();
    let rest: Vec<usize> = (0..n).filter(|&v| !done[v]).collect();
    let mut perm = order;
    perm.extend_from_slice(&rest);
    let mut pos = vec![0; n];
    for (k, &v) in perm.iter().enumerate() {
        pos[v] = k;
    }
    let cols = raw_cols.into_iter().map(|c| c.into_iter().map(|(u, a)| (pos[u], a)).collect()).collect();

    let mut off = Vec::new();
    for (li, &v) in rest.iter().enumerate() {
        for (&u, &a) in &adj[v] {
            let lj = pos[u] - eliminated;
            if li < lj && a != 0.0 {
                off.push((li, lj, a));
            }
        }
    }
    off.sort_by_key(|x| (x.0, x.1));
    let rdiag = rest.iter().map(|&v| diag[v]).collect();
    let reduced = SparseSymMatrix::from_canonical(rest.len(), rdiag, off);

    Ok(PartialCholFactor { n, perm, eliminated, pivots, cols, zero_last, reduced, projection })
}

/// `A = L D L^T` of a small irreducible `SDDM0` matrix with `D = I`, except
/// `D_nn = 0` for a singular Laplacian.
#[derive(Debug, Clone)]
pub struct BaseFactor {
    n: usize,
    /// Dense lower triangle, row-major.
    l: Vec<f64>,
    singular: bool,
    projection: bool,
}

/// Largest dimension [`ldl_base`] accepts.
pub const BASE_CAP: usize = 6000;

impl BaseFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn l_dense(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| if j <= i { self.l[i * self.n + j] } else { 0.0 })
    }

    pub fn d(&self) -> Vec<f64> {
        let mut d = vec![1.0; self.n];
        if self.singular {
            d[self.n - 1] = 0.0;
        }
        d
    }

    /// `Pi L^{-T} D L^{-1} Pi b`.
    pub fn apply_pinv(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(SddError::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let mut y = vec![0.0; self.n];
        self.apply_into(b, &mut y);
        Ok(y)
    }
}

impl LinearOperator for BaseFactor {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, b: &[f64], y: &mut [f64]) {
        let n = self.n;
        y.copy_from_slice(b);
        if self.projection {
            project_out_ones(y);
        }
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&y[..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        if self.singular {
            y[n - 1] = 0.0;
        }
        for i in (0..n).rev() {
            y[i] /= self.l[i * n + i];
            let yi = y[i];
            for j in 0..i {
                y[j] -= self.l[i * n + j] * yi;
            }
        }
        if self.projection {
            project_out_ones(y);
        }
    }
}

/// Dense Cholesky in natural order with the singular-last convention.
pub fn ldl_base(a: &SparseSymMatrix) -> Result<BaseFactor> {
    let class = classify(a);
    if !class.is_sddm0() {
        return Err(SddError::Classification { expected: "SDDM0", found: class.kind.to_string() });
    }
    if !class.irreducible {
        return Err(SddError::Reducible);
    }
    let n = a.n();
    if n > BASE_CAP {
        return Err(SddError::OracleCap { n, cap: BASE_CAP });
    }
    let projection = class.kind == MatrixKind::Laplacian;
    let tol = PIVOT_TOL * a.scale();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = a.diag()[i];
    }
    for &(i, j, v) in a.off_diagonal() {
        m[j * n + i] = v;
        m[i * n + j] = v;
    }
    let mut singular = false;
    for k in 0..n {
        let p = m[k * n + k];
        if p <= tol {
            if k + 1 == n && projection {
                m[k * n + k] = 1.0;
                singular = true;
                break;
            }
            return Err(SddError::Reducible);
        }
        let s = p.sqrt();
        m[k * n + k] = s;
        for i in k + 1..n {
            m[i * n + k] /= s;
        }
        for i in k + 1..n {
            let lik = m[i * n + k];
            if lik == 0.0 {
                continue;
            }
            for j in k + 1..=i {
                m[i * n + j] -= lik * m[j * n + k];
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            m[i * n + j] = 0.0;
        }
    }
    Ok(BaseFactor { n, l: m, singular, projection })
}
