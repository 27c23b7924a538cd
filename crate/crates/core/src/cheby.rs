//! Fixed-iteration preconditioned Chebyshev, preconditioned conjugate
//! gradients, and Lanczos estimates of preconditioned spectra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Result, SddError};
use crate::operator::{dot, LinearOperator};

/// `1 - 2 e^{-2}`: lower end of the window a level solver is tuned for.
pub fn level_lambda_min() -> f64 {
    1.0 - 2.0 * (-2.0f64).exp()
}

/// `2 e^{-2}`: accuracy each recursive level is built to.
pub fn level_eps() -> f64 {
    2.0 * (-2.0f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChebyParams {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub t: usize,
}

impl ChebyParams {
    /// Smallest `t` with `t >= (1/2) sqrt(lmax / lmin) ln(2 / eps)`.
    pub fn for_accuracy(lambda_min: f64, lambda_max: f64, eps: f64) -> Self {
        let t = (0.5 * (lambda_max / lambda_min).sqrt() * (2.0 / eps).ln()).ceil().max(1.0) as usize;
        ChebyParams { lambda_min, lambda_max, t }
    }

    /// Level defaults for a `k`-ultra-sparsifier: `[1 - 2e^-2, (1 + 2e^-2) k]`
    /// with `t = ceil(1.33 sqrt(k))`.
    pub fn level_default(k: f64) -> Self {
        ChebyParams {
            lambda_min: level_lambda_min(),
            lambda_max: (1.0 + level_eps()) * k,
            t: (1.33 * k.sqrt()).ceil().max(1.0) as usize,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t < 1 {
            return Err(SddError::OutOfRange("Chebyshev iteration count must be at least 1".into()));
        }
        if !(self.lambda_min > 0.0 && self.lambda_min <= self.lambda_max && self.lambda_max.is_finite()) {
            return Err(SddError::OutOfRange(format!(
                "need 0 < lambda_min <= lambda_max, got [{}, {}]",
                self.lambda_min, self.lambda_max
            )));
        }
        Ok(())
    }
}

/// Recurrence used by [`precond_cheby_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChebyRecurrence {
    /// Textbook three-term Chebyshev recurrence: first step `alpha = 1/d`,
    /// then `beta = (c alpha)^2 / 2` once and `(c alpha / 2)^2` afterwards,
    /// with `alpha = 1 / (d - beta / alpha)`.
    #[default]
    Standard,
    /// First step `alpha = 2/d`, then `beta = (c alpha / 2)^2` and
    /// `alpha = 1 / (d - beta)`. Kept for comparison; it is not scale
    /// invariant and does not meet the accuracy contract in general.
    Literal,
}

/// Exactly `t` iterations of preconditioned Chebyshev from `x = 0`.
///
/// When `lmin f^+ <= A <= lmax f^+`, the map `b -> x` is a symmetric linear
/// operator `Z` with `(1 - eps) Z^+ <= A <= (1 + eps) Z^+` for the `eps`
/// implied by `t`.
pub fn precond_cheby(
    a: &dyn LinearOperator,
    b: &[f64],
    t: usize,
    f: &dyn LinearOperator,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<Vec<f64>> {
    precond_cheby_with(a, b, t, f, lambda_min, lambda_max, ChebyRecurrence::Standard)
}

pub fn precond_cheby_with(
    a: &dyn LinearOperator,
    b: &[f64],
    t: usize,
    f: &dyn LinearOperator,
    lambda_min: f64,
    lambda_max: f64,
    rec: ChebyRecurrence,
) -> Result<Vec<f64>> {
    ChebyParams { lambda_min, lambda_max, t }.validate()?;
    let n = a.dim();
    if b.len() != n || f.dim() != n {
        return Err(SddError::DimensionMismatch { expected: n, got: if b.len() != n { b.len() } else { f.dim() } });
    }
    let d = (lambda_max + lambda_min) / 2.0;
    let c = (lambda_max - lambda_min) / 2.0;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ax = vec![0.0; n];
    let mut alpha = 0.0;
    for i in 1..=t {
        f.apply_into(&r, &mut z);
        if i == 1 {
            p.copy_from_slice(&z);
            alpha = match rec {
                ChebyRecurrence::Standard => 1.0 / d,
                ChebyRecurrence::Literal => 2.0 / d,
            };
        } else {
            let beta = match rec {
                ChebyRecurrence::Standard if i == 2 => 0.5 * (c * alpha).powi(2),
                _ => (c * alpha / 2.0).powi(2),
            };
            alpha = match rec {
                ChebyRecurrence::Standard => 1.0 / (d - beta / alpha),
                ChebyRecurrence::Literal => 1.0 / (d - beta),
            };
            for (pi, zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += alpha * pi;
        }
        if i < t {
            a.apply_into(&x, &mut ax);
            for k in 0..n {
                r[k] = b[k] - ax[k];
            }
        }
    }
    Ok(x)
}

/// Operator view of `b -> precond_cheby(A, b, t, f, lmin, lmax)`.
pub struct ChebyOperator<'a> {
    pub a: &'a dyn LinearOperator,
    pub f: &'a dyn LinearOperator,
    pub params: ChebyParams,
}

impl LinearOperator for ChebyOperator<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let out = precond_cheby(self.a, x, self.params.t, self.f, self.params.lambda_min, self.params.lambda_max)
            .expect("validated Chebyshev parameters");
        y.copy_from_slice(&out);
    }
}

#[derive(Debug, Clone)]
pub struct PcgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Final `sqrt(r^T M r)`.
    pub precond_residual: f64,
}

/// Preconditioned conjugate gradients from `x0` (zero when `None`).
///
/// Stops once `sqrt(r^T M r) <= eps * sqrt(r0^T M r0)` or after
/// `max_iters` iterations. A vanishing `p^T A p` or `r^T M r` with a
/// nonzero residual is reported as a breakdown.
pub fn pcg(
    a: &dyn LinearOperator,
    m: &dyn LinearOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    eps: f64,
    max_iters: usize,
) -> Result<PcgOutcome> {
    pcg_inner(a, m, b, x0, eps, max_iters, None)
}

#[allow(clippy::too_many_arguments)]
fn pcg_inner(
    a: &dyn LinearOperator,
    m: &dyn LinearOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    eps: f64,
    max_iters: usize,
    mut trace: Option<&mut Vec<(f64, f64)>>,
) -> Result<PcgOutcome> {
    let n = a.dim();
    if b.len() != n {
        return Err(SddError::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    let mut r = b.to_vec();
    let mut ap = vec![0.0; n];
    if x0.is_some() {
        a.apply_into(&x, &mut ap);
        for k in 0..n {
            r[k] -= ap[k];
        }
    }
    let mut z = m.apply(&r);
    let mut rz = dot(&r, &z);
    let target = eps * rz.max(0.0).sqrt();
    let bnorm = dot(b, b).sqrt();
    if rz.sqrt() <= target || dot(&r, &r).sqrt() <= 1e-300 || bnorm == 0.0 {
        return Ok(PcgOutcome { x, iterations: 0, converged: true, precond_residual: rz.max(0.0).sqrt() });
    }
    if rz <= 0.0 {
        return Err(SddError::Breakdown { method: "pcg", detail: "preconditioned residual has no positive mass".into() });
    }
    let mut p = z.clone();
    let mut it = 0;
    while it < max_iters {
        a.apply_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(SddError::Breakdown { method: "pcg", detail: format!("p^T A p = {pap:e} at iteration {it}") });
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        it += 1;
        m.apply_into(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        if let Some(tr) = trace.as_deref_mut() {
            tr.push((alpha, beta));
        }
        if rz_new.max(0.0).sqrt() <= target {
            return Ok(PcgOutcome { x, iterations: it, converged: true, precond_residual: rz_new.max(0.0).sqrt() });
        }
        if rz_new <= 0.0 {
            return Err(SddError::Breakdown { method: "pcg", detail: format!("r^T M r = {rz_new:e} at iteration {it}") });
        }
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Ok(PcgOutcome { x, iterations: it, converged: false, precond_residual: rz.max(0.0).sqrt() })
}

/// Ritz estimates of the extreme eigenvalues of `M A` on the range of `A`,
/// from up to `steps` iterations of PCG started at `b`. The flag is set
/// when the Krylov space became invariant first, making the values exact.
pub fn lanczos_extremes(a: &dyn LinearOperator, m: &dyn LinearOperator, b: &[f64], steps: usize) -> Option<(f64, f64, bool)> {
    let mut trace = Vec::new();
    let out = pcg_inner(a, m, b, None, 1e-14, steps, Some(&mut trace)).ok()?;
    let s = trace.len();
    if s == 0 {
        return None;
    }
    let mut t = DMatrix::zeros(s, s);
    for j in 0..s {
        let (alpha, _) = trace[j];
        let mut diag = 1.0 / alpha;
        if j > 0 {
            let (alpha_prev, beta_prev) = trace[j - 1];
            diag += beta_prev / alpha_prev;
            let off = beta_prev.sqrt() / alpha_prev;
            t[(j, j - 1)] = off;
            t[(j - 1, j)] = off;
        }
        t[(j, j)] = diag;
    }
    let ev = SymmetricEigen::new(t).eigenvalues;
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi, out.converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{laplacian_of, WeightedGraph};
    use crate::operator::Identity;
    use crate::spectral::{materialize, pinv};
    use nalgebra::DMatrix;

    #[test]
    fn exact_inverse_two_steps() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let inv = a.clone().try_inverse().unwrap();
        let b = [1.0, -2.0];
        let x = precond_cheby(&a, &b, 2, &inv, 1.0, 1.0).unwrap();
        let want = &inv * nalgebra::DVector::from_row_slice(&b);
        for i in 0..2 {
            assert!((x[i] - want[i]).abs() < 1e-14);
        }
        // the literal recurrence overshoots by 2x after one step, then lands
        let x1 = precond_cheby_with(&a, &b, 1, &inv, 1.0, 1.0, ChebyRecurrence::Literal).unwrap();
        assert!((x1[0] - 2.0 * want[0]).abs() < 1e-14);
        let x2 = precond_cheby_with(&a, &b, 2, &inv, 1.0, 1.0, ChebyRecurrence::Literal).unwrap();
        assert!((x2[0] - want[0]).abs() < 1e-14);
    }

    #[test]
    fn trivial_cases() {
        let id = Identity(3);
        assert_eq!(precond_cheby(&id, &[0.0; 3], 3, &id, 1.0, 1.0).unwrap(), vec![0.0; 3]);
        assert_eq!(precond_cheby(&id, &[1.0, 2.0, 3.0], 2, &id, 1.0, 1.0).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(precond_cheby(&id, &[1.0; 3], 0, &id, 1.0, 1.0).is_err());
        assert!(precond_cheby(&id, &[1.0; 3], 1, &id, 0.0, 1.0).is_err());
        assert!(precond_cheby(&id, &[1.0; 3], 1, &id, 2.0, 1.0).is_err());
    }

    #[test]
    fn chebyshev_contract_with_tree_preconditioner() {
        let g = WeightedGraph::from_edges(6, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 3.0), (4, 5, 1.0), (0, 5, 1.0), (1, 4, 0.5)])
            .unwrap();
        let t = WeightedGraph::from_edges(6, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 3.0), (4, 5, 1.0)]).unwrap();
        let a = laplacian_of(&g).to_dense();
        let f = pinv(&laplacian_of(&t).to_dense());
        let ev = crate::spectral::generalized_spectrum(&a, &laplacian_of(&t).to_dense()).unwrap();
        let (lo, hi) = (ev[0], *ev.last().unwrap());
        for eps in [0.5, 0.1, 0.01] {
            let p = ChebyParams::for_accuracy(lo, hi, eps);
            let z = materialize(6, |b| precond_cheby(&a, b, p.t, &f, lo, hi).unwrap());
            assert!((&z - z.transpose()).amax() < 1e-10);
            let mu = crate::spectral::generalized_spectrum(&a, &pinv(&z)).unwrap();
            for l in mu {
                assert!(l >= 1.0 - eps - 1e-9 && l <= 1.0 + eps + 1e-9, "eps {eps}: {l}");
            }
        }
    }

    #[test]
    fn pcg_examples() {
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let inv = a.clone().try_inverse().unwrap();
        let out = pcg(&a, &inv, &[1.0, 2.0], None, 1e-12, 10).unwrap();
        assert_eq!(out.iterations, 1);
        let id = Identity(3);
        let out = pcg(&id, &id, &[1.0, 2.0, 3.0], None, 1e-12, 10).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn lanczos_finds_extremes() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec((1..=20).map(|i| i as f64).collect()));
        let b: Vec<f64> = (0..20).map(|i| 1.0 + (i as f64).sin()).collect();
        let (lo, hi, _) = lanczos_extremes(&a, &Identity(20), &b, 20).unwrap();
        assert!((lo - 1.0).abs() < 1e-6 && (hi - 20.0).abs() < 1e-6);
    }
}
