//! Dense spectral oracles: pseudo-inverses, generalized spectra and finite
//! condition numbers. Cubic cost; intended for small instances and tests.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SddError};
use crate::matrix::SparseSymMatrix;

/// Largest dimension the dense oracles accept by default.
pub const ORACLE_CAP: usize = 400;

const REL_TOL: f64 = 1e-10;

fn eig(a: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let sym = (a + a.transpose()) * 0.5;
    SymmetricEigen::new(sym)
}

fn cutoff(values: &DVector<f64>) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    REL_TOL * scale.max(f64::MIN_POSITIVE)
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix.
pub fn pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let e = eig(a);
    let tol = cutoff(&e.eigenvalues);
    let mut out = DMatrix::zeros(n, n);
    for (k, &lam) in e.eigenvalues.iter().enumerate() {
        if lam.abs() > tol {
            let u = e.eigenvectors.column(k);
            out += (u * u.transpose()) / lam;
        }
    }
    out
}

/// Rank of a symmetric matrix at the oracle's relative tolerance.
pub fn rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 {
        return 0;
    }
    let e = eig(a);
    let tol = cutoff(&e.eigenvalues);
    e.eigenvalues.iter().filter(|v| v.abs() > tol).count()
}

/// Finite eigenvalues of the pencil `(A, B)` restricted to the range of `B`,
/// ascending. Both matrices must be symmetric positive semidefinite with the
/// same nullspace.
pub fn generalized_spectrum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if b.nrows() != n {
        return Err(SddError::DimensionMismatch { expected: n, got: b.nrows() });
    }
    if n > ORACLE_CAP {
        return Err(SddError::OracleCap { n, cap: ORACLE_CAP });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let eb = eig(b);
    let tol = cutoff(&eb.eigenvalues);
    let keep: Vec<usize> = (0..n).filter(|&k| eb.eigenvalues[k] > tol).collect();
    let null: Vec<usize> = (0..n).filter(|&k| eb.eigenvalues[k] <= tol).collect();
    if null.iter().any(|&k| eb.eigenvalues[k] < -1e3 * tol) {
        return Err(SddError::Precondition("second operand is not positive semidefinite".into()));
    }

    // nullspace of B must be annihilated by A, and ranks must agree
    let a_scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for &k in &null {
        let u = eb.eigenvectors.column(k);
        if (a * u).amax() > 1e-7 * a_scale {
            return Err(SddError::NullspaceMismatch);
        }
    }
    if rank(a) != keep.len() {
        return Err(SddError::NullspaceMismatch);
    }

    let r = keep.len();
    let mut w = DMatrix::zeros(n, r);
    for (c, &k) in keep.iter().enumerate() {
        let s = 1.0 / eb.eigenvalues[k].sqrt();
        w.set_column(c, &(eb.eigenvectors.column(k) * s));
    }
    let c = w.transpose() * a * &w;
    let mut vals: Vec<f64> = eig(&c).eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.total_cmp(y));
    Ok(vals)
}

/// `kappa_f(A, B)`: ratio of the largest to the smallest nonzero eigenvalue
/// of `A B^+`.
pub fn finite_condition_number(a: &SparseSymMatrix, b: &SparseSymMatrix) -> Result<f64> {
    finite_condition_number_dense(&a.to_dense(), &b.to_dense())
}

pub fn finite_condition_number_dense(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    let vals = generalized_spectrum(a, b)?;
    match (vals.first(), vals.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => Ok(hi / lo),
        (Some(_), Some(_)) => Err(SddError::NullspaceMismatch),
        _ => Ok(1.0),
    }
}

/// Builds the dense matrix of a linear map by applying it to unit vectors.
pub fn materialize(n: usize, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = f(&e);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    m
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = eig(a).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.total_cmp(y));
    v
}

/// Second-smallest eigenvalue of a Laplacian.
pub fn lambda2(a: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(a).get(1).copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{laplacian_of, WeightedGraph};

    fn fig1() -> DMatrix<f64> {
        let g = WeightedGraph::from_edges(4, [(0, 1, 1.5), (1, 2, 2.0), (1, 3, 0.5), (2, 3, 1.0)]).unwrap();
        laplacian_of(&g).to_dense()
    }

    #[test]
    fn pinv_axioms_on_laplacian() {
        let a = fig1();
        let p = pinv(&a);
        assert!((&a * &p * &a - &a).amax() < 1e-12);
        assert!((&p * &a * &p - &p).amax() < 1e-12);
        assert!((&a * &p - (&a * &p).transpose()).amax() < 1e-12);
    }

    #[test]
    fn kappa_examples() {
        let a = fig1();
        assert!((finite_condition_number_dense(&a, &a).unwrap() - 1.0).abs() < 1e-10);
        assert!((finite_condition_number_dense(&a, &(&a * 0.5)).unwrap() - 1.0).abs() < 1e-10);

        let c4 = WeightedGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
        let p4 = WeightedGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let k = finite_condition_number(&laplacian_of(&c4), &laplacian_of(&p4)).unwrap();
        assert!((1.0..=6.0).contains(&k));
        // adding the edge (0,3) of stretch 3 raises the top eigenvalue to exactly 4
        assert!((k - 4.0).abs() < 1e-9);
    }

    #[test]
    fn nullspace_mismatch_detected() {
        let a = fig1();
        let b = DMatrix::identity(4, 4);
        assert!(matches!(generalized_spectrum(&a, &b), Err(SddError::NullspaceMismatch)));
    }

    #[test]
    fn oracle_cap_enforced() {
        let a = DMatrix::identity(ORACLE_CAP + 1, ORACLE_CAP + 1);
        assert!(matches!(generalized_spectrum(&a, &a), Err(SddError::OracleCap { .. })));
    }
}
