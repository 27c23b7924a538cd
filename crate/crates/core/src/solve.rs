//! Top-level solvers for `SDD0` systems: the recursive chain, a one-level
//! ultra-sparsifier preconditioner with an exact inner solve, and plain
//! tree-preconditioned CG. Every mode verifies its answer a posteriori.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{build_preconditioners, ChainConfig, ChainSummary, JacobiOp};
use crate::cheby::{level_lambda_min, pcg};
use crate::cholesky::partial_cholesky;
use crate::error::{Result, SddError};
use crate::graph::laplacian_of;
use crate::matrix::{classify, graph_of, gremban_recover, gremban_reduce, split_sddm, MatrixKind, SparseSymMatrix};
use crate::operator::{dot, norm, project_out_ones, LinearOperator};
use crate::tree::build_tree;
use crate::ultra::ultra_sparsify;

/// Version tag written into every serialized report.
pub const REPORT_SCHEMA: &str = "sddsolve-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    #[default]
    Recursive,
    OneLevel,
    PcgTree,
}

impl std::str::FromStr for SolveMode {
    type Err = SddError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursive" => Ok(SolveMode::Recursive),
            "one-level" => Ok(SolveMode::OneLevel),
            "pcg-tree" => Ok(SolveMode::PcgTree),
            _ => Err(SddError::OutOfRange(format!("unknown mode '{s}'"))),
        }
    }
}

impl std::fmt::Display for SolveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveMode::Recursive => "recursive",
            SolveMode::OneLevel => "one-level",
            SolveMode::PcgTree => "pcg-tree",
        })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolveConfig {
    pub mode: SolveMode,
    pub chain: ChainConfig,
    /// Extra top-level passes on the residual before falling back to PCG.
    pub max_refinements: usize,
    /// PCG iteration cap; `10 sqrt(n)` when unset.
    pub max_iters: Option<usize>,
    /// Also require `||b - A x|| / ||b|| <= residual_tol` per component.
    pub residual_tol: Option<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { mode: SolveMode::Recursive, chain: ChainConfig::default(), max_refinements: 3, max_iters: None, residual_tol: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Verified,
    Flagged,
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Timings {
    pub build_ms: f64,
    pub solve_ms: f64,
    pub verify_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolveReport {
    pub schema: String,
    pub status: SolveStatus,
    pub mode: SolveMode,
    pub n: usize,
    pub nnz_offdiag: usize,
    pub matrix_kind: MatrixKind,
    pub gremban: bool,
    pub components: usize,
    /// Whether `b` had a component outside the range of `A` that was removed.
    pub projected_rhs: bool,
    pub eps_requested: f64,
    /// `||b - A x|| / ||b||`.
    pub residual_achieved: f64,
    /// Upper estimate of `||x - A^+ b||_A / ||A^+ b||_A`, worst component.
    pub error_estimate: f64,
    pub outer_iterations: usize,
    pub refinements: usize,
    pub fallback_iterations: usize,
    pub chains: Vec<ChainSummary>,
    pub timings: Timings,
    pub seed: u64,
    pub config: SolveConfig,
}

/// Solves `A x = b` for `A` in `SDD0` to relative `A`-norm error `eps`.
///
/// Positive off-diagonals are handled by the doubling reduction, reducible
/// matrices per component, and right-hand sides outside the range of a
/// singular block are projected. A failed verification still returns the
/// best `x`, with a flagged report.
pub fn solve(a: &SparseSymMatrix, b: &[f64], eps: f64, cfg: &SolveConfig) -> Result<(Vec<f64>, SolveReport)> {
    let started = Instant::now();
    if b.len() != a.n() {
        return Err(SddError::DimensionMismatch { expected: a.n(), got: b.len() });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SddError::OutOfRange(format!("eps = {eps} must lie in (0, 1)")));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(SddError::Precondition("right-hand side has non-finite entries".into()));
    }
    let class = classify(a);
    if !class.is_sdd0() {
        return Err(SddError::Classification { expected: "SDD0", found: class.kind.to_string() });
    }
    let mut report = SolveReport {
        schema: REPORT_SCHEMA.to_string(),
        status: SolveStatus::Verified,
        mode: cfg.mode,
        n: a.n(),
        nnz_offdiag: a.noff(),
        matrix_kind: class.kind,
        gremban: class.kind == MatrixKind::Sdd0,
        components: 0,
        projected_rhs: false,
        eps_requested: eps,
        residual_achieved: 0.0,
        error_estimate: 0.0,
        outer_iterations: 0,
        refinements: 0,
        fallback_iterations: 0,
        chains: Vec::new(),
        timings: Timings::default(),
        seed: cfg.chain.seed,
        config: cfg.clone(),
    };
    let (x, b_eff) = if report.gremban {
        let (ah, bh) = gremban_reduce(a, b)?;
        let (xh, bh_eff) = solve_sddm(&ah, &bh, eps, cfg, &mut report)?;
        (gremban_recover(&xh)?, gremban_recover(&bh_eff)?)
    } else {
        solve_sddm(a, b, eps, cfg, &mut report)?
    };
    // residual against the part of b in the range of A
    let b = &b_eff;
    let ax = a.apply(&x)?;
    let bn = norm(b);
    let rn = b.iter().zip(&ax).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    report.residual_achieved = if bn > 0.0 { rn / bn } else { rn };
    report.timings.total_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok((x, report))
}

/// [`solve`] in one-level mode: PCG preconditioned by a `sqrt(m)`
/// ultra-sparsifier, whose reduced system is solved by inner CG.
pub fn one_level_solve(a: &SparseSymMatrix, b: &[f64], eps: f64) -> Result<(Vec<f64>, SolveReport)> {
    solve(a, b, eps, &SolveConfig { mode: SolveMode::OneLevel, ..Default::default() })
}

fn solve_sddm(a: &SparseSymMatrix, b: &[f64], eps: f64, cfg: &SolveConfig, report: &mut SolveReport) -> Result<(Vec<f64>, Vec<f64>)> {
    let comps = a.components();
    report.components = comps.len();
    let mut x = vec![0.0; a.n()];
    let mut b_eff = vec![0.0; a.n()];
    for comp in comps {
        let sub = a.submatrix(&comp);
        let mut bs: Vec<f64> = comp.iter().map(|&v| b[v]).collect();
        let xs = solve_component(&sub, &mut bs, eps, cfg, report)?;
        for (k, &v) in comp.iter().enumerate() {
            x[v] = xs[k];
            b_eff[v] = bs[k];
        }
    }
    Ok((x, b_eff))
}

struct Verdict {
    ok: bool,
    rel: f64,
}

/// With `M >= floor * A^+`, `||x - A^+ b||_A <= sqrt(r^T M r / floor)`,
/// and `||A^+ b||_A >= ||x||_A` minus that.
fn verify(
    a: &SparseSymMatrix,
    m: &dyn LinearOperator,
    floor: f64,
    b: &[f64],
    x: &[f64],
    eps: f64,
    res_tol: Option<f64>,
) -> (Verdict, Vec<f64>) {
    let ax = a.apply(x).expect("matching dimensions");
    let r: Vec<f64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
    let err = (dot(&r, &m.apply(&r)).max(0.0) / floor).sqrt();
    let xa = dot(x, &ax).max(0.0).sqrt();
    let rel = if xa > err { err / (xa - err) } else { f64::INFINITY };
    let res_ok = res_tol.is_none_or(|tol| norm(&r) <= tol * norm(b));
    (Verdict { ok: (err == 0.0 || rel <= eps) && res_ok, rel }, r)
}

/// Solves one irreducible block; `b` is projected onto the range in place.
fn solve_component(a: &SparseSymMatrix, b: &mut [f64], eps: f64, cfg: &SolveConfig, report: &mut SolveReport) -> Result<Vec<f64>> {
    let n = a.n();
    let laplacian = classify(a).kind == MatrixKind::Laplacian;
    if laplacian {
        let before = norm(b);
        project_out_ones(b);
        if before > 0.0 && (before - norm(b)) > 1e-12 * before {
            report.projected_rhs = true;
        }
    }
    let b: &[f64] = b;
    if norm(b) == 0.0 {
        return Ok(vec![0.0; n]);
    }
    if n == 1 {
        let d = a.diag()[0];
        return Ok(if laplacian { vec![0.0] } else { vec![b[0] / d] });
    }
    let max_iters = cfg.max_iters.unwrap_or(((10.0 * (n as f64).sqrt()).ceil() as usize).max(50));
    let t0 = Instant::now();
    match cfg.mode {
        SolveMode::Recursive => {
            let chain = build_preconditioners(a, &cfg.chain)?;
            report.timings.build_ms += t0.elapsed().as_secs_f64() * 1e3;
            report.chains.push(chain.summary());
            let m = chain.preconditioner();
            let floor = if chain.is_empty() { 1.0 } else { level_lambda_min() };
            let params = chain.top_params(eps);
            let t1 = Instant::now();
            let mut x = chain.apply(b, params)?;
            report.outer_iterations += if chain.is_empty() { 1 } else { params.t };
            report.timings.solve_ms += t1.elapsed().as_secs_f64() * 1e3;
            let t2 = Instant::now();
            let (mut v, mut r) = verify(a, &m, floor, b, &x, eps, cfg.residual_tol);
            let mut rounds = 0;
            while !v.ok && rounds < cfg.max_refinements {
                let dx = chain.apply(&r, params)?;
                for (xi, di) in x.iter_mut().zip(&dx) {
                    *xi += di;
                }
                rounds += 1;
                (v, r) = verify(a, &m, floor, b, &x, eps, cfg.residual_tol);
            }
            report.refinements += rounds;
            if !v.ok {
                log::warn!("refinement did not verify (estimate {:.3e}); falling back to PCG", v.rel);
                let out = pcg(a, &m, b, Some(&x), eps * eps, max_iters)?;
                report.fallback_iterations += out.iterations;
                x = out.x;
                (v, _) = verify(a, &m, floor, b, &x, eps, cfg.residual_tol);
            }
            report.timings.verify_ms += t2.elapsed().as_secs_f64() * 1e3;
            finish(report, v, &mut x, laplacian);
            Ok(x)
        }
        SolveMode::OneLevel | SolveMode::PcgTree => {
            let (lap, excess) = split_sddm(a)?;
            let g = graph_of(&lap);
            let bmat = if cfg.mode == SolveMode::PcgTree {
                let t = build_tree(&g, cfg.chain.ultra.tree)?;
                laplacian_of(&t.to_graph()).add_diagonal(&excess)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.chain.seed);
                let k = (g.m().max(1) as f64).sqrt().max(1.0);
                let u = ultra_sparsify(&g, k, &cfg.chain.ultra, &mut rng)?;
                laplacian_of(&u.graph()).add_diagonal(&excess)
            };
            let factor = partial_cholesky(&bmat)?;
            let a1 = factor.reduced().clone();
            let a1_singular = classify(&a1).kind == MatrixKind::Laplacian;
            let jacobi = JacobiOp(a1.diag().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 }).collect());
            let inner = crate::operator::FnOperator::new(a1.n(), |x: &[f64], y: &mut [f64]| {
                let mut rhs = x.to_vec();
                if a1_singular {
                    project_out_ones(&mut rhs);
                }
                let mut out = pcg(&a1, &jacobi, &rhs, None, 1e-13, 20 * a1.n() + 100).map(|o| o.x).unwrap_or_else(|_| vec![0.0; a1.n()]);
                if a1_singular {
                    project_out_ones(&mut out);
                }
                y.copy_from_slice(&out);
            });
            let m = crate::operator::FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
                y.copy_from_slice(&factor.apply_pinv(&inner, x).expect("matching dimensions"));
            });
            report.timings.build_ms += t0.elapsed().as_secs_f64() * 1e3;
            let t1 = Instant::now();
            let mut tol = eps;
            let mut out = pcg(a, &m, b, None, tol, max_iters)?;
            report.outer_iterations += out.iterations;
            report.timings.solve_ms += t1.elapsed().as_secs_f64() * 1e3;
            let t2 = Instant::now();
            let (mut v, _) = verify(a, &m, 1.0, b, &out.x, eps, cfg.residual_tol);
            let mut rounds = 0;
            while !v.ok && rounds < cfg.max_refinements {
                tol *= 0.1;
                out = pcg(a, &m, b, Some(&out.x), tol, max_iters)?;
                report.fallback_iterations += out.iterations;
                rounds += 1;
                (v, _) = verify(a, &m, 1.0, b, &out.x, eps, cfg.residual_tol);
            }
            report.refinements += rounds;
            report.timings.verify_ms += t2.elapsed().as_secs_f64() * 1e3;
            let mut x = out.x;
            finish(report, v, &mut x, laplacian);
            Ok(x)
        }
    }
}

fn finish(report: &mut SolveReport, v: Verdict, x: &mut [f64], laplacian: bool) {
    if laplacian {
        project_out_ones(x);
    }
    report.error_estimate = report.error_estimate.max(v.rel.min(f64::MAX));
    if !v.ok {
        report.status = SolveStatus::Flagged;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use crate::spectral::pinv;
    use nalgebra::{DMatrix, DVector};

    fn figure_one() -> SparseSymMatrix {
        laplacian_of(&WeightedGraph::from_edges(4, [(0, 1, 1.5), (1, 2, 2.0), (1, 3, 0.5), (2, 3, 1.0)]).unwrap())
    }

    fn a_norm_error(a: &SparseSymMatrix, b: &[f64], x: &[f64]) -> f64 {
        let ad = a.to_dense();
        let xs = pinv(&ad) * DVector::from_row_slice(b);
        let d = DVector::from_row_slice(x) - &xs;
        ((d.transpose() * &ad * &d)[(0, 0)] / (xs.transpose() * &ad * &xs)[(0, 0)]).sqrt()
    }

    fn all_modes() -> [SolveMode; 3] {
        [SolveMode::Recursive, SolveMode::OneLevel, SolveMode::PcgTree]
    }

    #[test]
    fn diagonal() {
        let a = SparseSymMatrix::diagonal(vec![2.0, 4.0]);
        for mode in all_modes() {
            let (x, rep) = solve(&a, &[2.0, 4.0], 1e-8, &SolveConfig { mode, ..Default::default() }).unwrap();
            assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
            assert_eq!(rep.status, SolveStatus::Verified);
            assert_eq!(rep.components, 2);
        }
    }

    #[test]
    fn figure_one_laplacian() {
        let a = figure_one();
        let b = [1.0, -1.0, 0.0, 0.0];
        for mode in all_modes() {
            let (x, rep) = solve(&a, &b, 1e-8, &SolveConfig { mode, ..Default::default() }).unwrap();
            assert!(a_norm_error(&a, &b, &x) <= 1e-8, "{mode}");
            assert_eq!(rep.status, SolveStatus::Verified);
            assert!(x.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn gremban_path() {
        let a = SparseSymMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]));
        for mode in all_modes() {
            let (x, rep) = solve(&a, &[1.0, 1.0], 1e-10, &SolveConfig { mode, ..Default::default() }).unwrap();
            assert!(rep.gremban);
            assert!((x[0] - 1.0 / 3.0).abs() < 1e-9 && (x[1] - 1.0 / 3.0).abs() < 1e-9, "{x:?}");
        }
    }

    #[test]
    fn rejects_non_sdd() {
        let a = SparseSymMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]));
        assert!(matches!(solve(&a, &[1.0, 1.0], 1e-6, &SolveConfig::default()), Err(SddError::Classification { .. })));
        assert!(solve(&figure_one(), &[1.0; 3], 1e-6, &SolveConfig::default()).is_err());
    }

    #[test]
    fn projects_rhs_out_of_range() {
        let (x, rep) = solve(&figure_one(), &[1.0, 0.0, 0.0, 0.0], 1e-8, &SolveConfig::default()).unwrap();
        assert!(rep.projected_rhs);
        assert!(a_norm_error(&figure_one(), &[0.75, -0.25, -0.25, -0.25], &x) < 1e-8);
    }

    #[test]
    fn grid_recursive_with_levels() {
        let k = 14;
        let mut e = Vec::new();
        for r in 0..k {
            for c in 0..k {
                let v = r * k + c;
                if c + 1 < k {
                    e.push((v, v + 1, 1.0 + ((v * 7) % 5) as f64));
                }
                if r + 1 < k {
                    e.push((v, v + k, 1.0));
                }
            }
        }
        let a = laplacian_of(&WeightedGraph::from_edges(k * k, e).unwrap());
        let b: Vec<f64> = (0..k * k).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let mut bp = b.clone();
        project_out_ones(&mut bp);
        for eps in [1e-2, 1e-6] {
            for mode in all_modes() {
                let mut cfg = SolveConfig { mode, ..Default::default() };
                cfg.chain.base_dim_threshold = Some(20);
                let (x, rep) = solve(&a, &b, eps, &cfg).unwrap();
                assert_eq!(rep.status, SolveStatus::Verified, "{mode}");
                assert!(a_norm_error(&a, &bp, &x) <= eps, "{mode} {eps}");
                if mode == SolveMode::Recursive {
                    assert!(rep.chains[0].levels >= 1);
                }
            }
        }
    }
}
