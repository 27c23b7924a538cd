//! Approximate Fiedler vectors by inverse power iteration, with the solver
//! chain standing in for the pseudo-inverse.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::chain::{build_preconditioners, ChainConfig};
use crate::error::{Result, SddError};
use crate::matrix::{classify, MatrixKind, SparseSymMatrix};
use crate::operator::{dot, norm, project_out_ones};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FiedlerResult {
    /// Unit vector orthogonal to the all-ones vector.
    pub v: Vec<f64>,
    pub rayleigh: f64,
    pub trials: usize,
    /// Power iterations per trial.
    pub iterations: usize,
    /// Chebyshev iterations per application of the approximate inverse.
    pub cheby_t: usize,
    pub seed: u64,
}

/// `v^T A v / v^T v`.
pub fn rayleigh_quotient(a: &SparseSymMatrix, v: &[f64]) -> Result<f64> {
    if v.len() != a.n() {
        return Err(SddError::DimensionMismatch { expected: a.n(), got: v.len() });
    }
    let vv = dot(v, v);
    if vv == 0.0 {
        return Err(SddError::Precondition("zero vector".into()));
    }
    Ok(a.quadratic(v) / vv)
}

/// `ceil(log2(1/p))` independent trials of `8 ln(18(n-1)/eps)/eps` steps of
/// inverse power iteration from a random unit vector orthogonal to ones;
/// returns the trial with the smallest Rayleigh quotient.
pub fn approx_fiedler(a: &SparseSymMatrix, eps: f64, p: f64, cfg: &ChainConfig) -> Result<FiedlerResult> {
    let class = classify(a);
    if class.kind != MatrixKind::Laplacian {
        return Err(SddError::Classification { expected: "Laplacian", found: class.kind.to_string() });
    }
    if !class.irreducible {
        return Err(SddError::Reducible);
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(SddError::OutOfRange(format!("eps = {eps} must lie in (0, 1]")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(SddError::OutOfRange(format!("p = {p} must lie in (0, 1)")));
    }
    let n = a.n();
    if n < 2 {
        return Err(SddError::Precondition("need at least two vertices".into()));
    }
    let iterations = (8.0 * (18.0 * (n - 1) as f64 / eps).ln() / eps).ceil() as usize;
    let trials = (1.0 / p).log2().ceil().max(1.0) as usize;
    let chain = build_preconditioners(a, cfg)?;
    let params = chain.top_params(eps / 4.0);

    let mut best: Option<(f64, Vec<f64>)> = None;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(trial as u64);
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        normalize_perp(&mut v);
        for _ in 0..iterations {
            v = chain.apply(&v, params)?;
            normalize_perp(&mut v);
        }
        let rq = rayleigh_quotient(a, &v)?;
        if best.as_ref().is_none_or(|(b, _)| rq < *b) {
            best = Some((rq, v));
        }
    }
    let (rayleigh, v) = best.expect("at least one trial");
    Ok(FiedlerResult { v, rayleigh, trials, iterations, cheby_t: if chain.is_empty() { 0 } else { params.t }, seed: cfg.seed })
}

fn normalize_perp(v: &mut [f64]) {
    project_out_ones(v);
    let s = norm(v);
    if s > 0.0 {
        for x in v.iter_mut() {
            *x /= s;
        }
    }
}
