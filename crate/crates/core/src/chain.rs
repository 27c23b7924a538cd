//! The recursive preconditioner chain: alternate ultra-sparsification and
//! partial Cholesky until the reduced matrix is small, then factor it
//! exactly. Each level's solve runs preconditioned Chebyshev on the next
//! reduced matrix, preconditioned by the level below.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cheby::{lanczos_extremes, level_eps, level_lambda_min, pcg, precond_cheby, ChebyParams};
use crate::cholesky::{ldl_base, partial_cholesky, BaseFactor, PartialCholFactor, BASE_CAP};
use crate::error::{Result, SddError};
use crate::graph::laplacian_of;
use crate::matrix::{classify, graph_of, split_sddm, MatrixKind, SparseSymMatrix};
use crate::operator::{project_out_ones, LinearOperator};
use crate::sparsify::Sparsifier;
use crate::ultra::{ultra_sparsify, UltraBudget, UltraConfig, UltraStats};

/// How the Chebyshev eigenvalue windows of the chain are chosen.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum BoundsPolicy {
    /// `[1 - 2e^-2, (1 + 2e^-2) k]` at every level, as the analysis
    /// prescribes; only sound when every `B_i` is a `k`-ultra-sparsifier.
    Analytic,
    /// Upper end from a Lanczos estimate times `safety`, built bottom-up.
    Estimated { safety: f64, steps: usize },
}

impl Default for BoundsPolicy {
    fn default() -> Self {
        BoundsPolicy::Estimated { safety: 1.2, steps: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChainConfig {
    pub c3: f64,
    pub c4: f64,
    /// Overrides for `chi`, `k` and the base dimension threshold.
    pub chi: Option<f64>,
    pub k: Option<f64>,
    pub base_dim_threshold: Option<usize>,
    pub ultra: UltraConfig,
    pub bounds: BoundsPolicy,
    pub max_levels: usize,
    /// Stop recursing when a level keeps more than this fraction of the
    /// previous dimension.
    pub min_shrink: f64,
    pub retries: usize,
    pub seed: u64,
    /// Sparsify `A_0` before building `B_1`.
    pub presparsify: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            c3: 1.0,
            c4: 2.0,
            chi: None,
            k: None,
            base_dim_threshold: None,
            ultra: UltraConfig { budget: UltraBudget::OffTreeFraction(0.03), ..Default::default() },
            bounds: BoundsPolicy::default(),
            max_levels: 32,
            min_shrink: 0.9,
            retries: 3,
            seed: 0,
            presparsify: false,
        }
    }
}

/// Resolved `(chi, k, threshold)` for dimension `n`.
pub fn chain_params(n: usize, cfg: &ChainConfig) -> (f64, f64, usize) {
    let nf = n.max(1) as f64;
    let chi = cfg.chi.unwrap_or_else(|| {
        let raw = (cfg.c3 * nf.log2().powf(cfg.c4)).max(1.0);
        // largest chi with (14 chi + 1)^2 <= n
        let cap = ((nf.sqrt() - 1.0) / 14.0).max(1e-3);
        raw.min(cap)
    });
    let k = cfg.k.unwrap_or((14.0 * chi + 1.0).powi(2));
    let threshold = cfg.base_dim_threshold.unwrap_or_else(|| ((66.0 * chi + 6.0).ceil() as usize).min(512));
    (chi, k, threshold)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LevelStats {
    pub dim: usize,
    pub noff_prev: usize,
    pub tree_edges: usize,
    pub extra_edges: usize,
    pub eliminated: usize,
    pub reduced_dim: usize,
    pub reduced_noff: usize,
    pub cheby: Option<ChebyParams>,
    pub ultra: UltraStats,
    pub build_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BaseKind {
    Empty,
    Dense,
    /// The last reduced matrix was too large to factor; solved by CG.
    Iterative,
}

#[derive(Debug, Clone)]
enum Base {
    Empty,
    Dense(BaseFactor),
    Iterative(SparseSymMatrix),
}

#[derive(Debug, Clone)]
struct Level {
    b: SparseSymMatrix,
    factor: PartialCholFactor,
    /// Window for Chebyshev on this level's reduced matrix, preconditioned
    /// by the next level; `None` at the last level.
    cheby: Option<ChebyParams>,
    stats: LevelStats,
}

/// `B_1, ..., B_l` with their factors and the base solver for `A_l`.
#[derive(Debug, Clone)]
pub struct SolverChain {
    a0: SparseSymMatrix,
    levels: Vec<Level>,
    base: Base,
    /// Window for the top-level Chebyshev on `A_0` preconditioned by
    /// `Solve_{B_1}`; the iteration count depends on the requested accuracy.
    top: (f64, f64),
    pub chi: f64,
    pub k: f64,
    pub base_dim_threshold: usize,
    pub policy: BoundsPolicy,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChainSummary {
    pub n: usize,
    pub levels: usize,
    pub chi: f64,
    pub k: f64,
    pub base_dim_threshold: usize,
    pub base: BaseKind,
    pub base_dim: usize,
    pub top_lambda: (f64, f64),
    pub level_stats: Vec<LevelStats>,
    pub seed: u64,
}

/// Builds the chain for an irreducible `SDDM0` matrix.
pub fn build_preconditioners(a0: &SparseSymMatrix, cfg: &ChainConfig) -> Result<SolverChain> {
    let class = classify(a0);
    if !class.is_sddm0() {
        return Err(SddError::Classification { expected: "SDDM0", found: class.kind.to_string() });
    }
    if !class.irreducible {
        return Err(SddError::Reducible);
    }
    let mut last = None;
    for attempt in 0..=cfg.retries {
        let seed = cfg.seed.wrapping_add(attempt as u64);
        match build_once(a0, cfg, seed) {
            Ok(c) => return Ok(c),
            Err(e) => {
                log::warn!("chain build with seed {seed} failed: {e}");
                last = Some(e);
            }
        }
    }
    Err(last.expect("at least one attempt"))
}

fn build_once(a0: &SparseSymMatrix, cfg: &ChainConfig, seed: u64) -> Result<SolverChain> {
    let (chi, k, threshold) = chain_params(a0.n(), cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<Level> = Vec::new();
    let mut cur = a0.clone();
    while cur.n() >= threshold.max(1) && levels.len() < cfg.max_levels {
        let started = Instant::now();
        let (lap, excess) = split_sddm(&cur)?;
        let mut g = graph_of(&lap);
        if cfg.presparsify && levels.is_empty() {
            let logn = (g.n().max(2) as f64).ln();
            if g.m() as f64 > 8.0 * g.n() as f64 * logn {
                let p = 1.0 / (g.n() as f64).powi(2);
                g = cfg.ultra.sparsifier.sparsify(&g, p, &mut rng);
            }
        }
        let u = ultra_sparsify(&g, k, &cfg.ultra, &mut rng)?;
        let ug = u.graph();
        if !ug.is_connected() {
            return Err(SddError::Disconnected { components: crate::graph::connected_components(&ug).len() });
        }
        let b = laplacian_of(&ug).add_diagonal(&excess);
        let factor = partial_cholesky(&b)?;
        let reduced = factor.reduced();
        let stats = LevelStats {
            dim: cur.n(),
            noff_prev: cur.noff(),
            tree_edges: u.tree_edges.len(),
            extra_edges: u.extra_edges.len(),
            eliminated: factor.eliminated_count(),
            reduced_dim: reduced.n(),
            reduced_noff: reduced.noff(),
            cheby: None,
            ultra: u.stats.clone(),
            build_ms: started.elapsed().as_secs_f64() * 1e3,
        };
        log::debug!(
            "level {}: dim {} -> {}, noff {} -> {} (ratios {:.3}, {:.3})",
            levels.len() + 1,
            stats.dim,
            stats.reduced_dim,
            stats.noff_prev,
            stats.reduced_noff,
            stats.reduced_dim as f64 / stats.noff_prev.max(1) as f64,
            stats.reduced_noff as f64 / stats.noff_prev.max(1) as f64,
        );
        let stalled = reduced.n() as f64 > cfg.min_shrink * cur.n() as f64;
        cur = reduced.clone();
        levels.push(Level { b, factor, cheby: None, stats });
        if stalled {
            log::warn!("chain stalled at dimension {}", cur.n());
            break;
        }
    }

    let base = if cur.n() == 0 {
        Base::Empty
    } else if cur.n() <= BASE_CAP {
        Base::Dense(ldl_base(&cur)?)
    } else {
        Base::Iterative(cur)
    };
    let mut chain = SolverChain {
        a0: a0.clone(),
        levels,
        base,
        top: (1.0, 1.0),
        chi,
        k,
        base_dim_threshold: threshold,
        policy: cfg.bounds,
        seed,
    };
    chain.set_bounds(&mut rng);
    Ok(chain)
}

impl SolverChain {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.a0.n()
    }

    pub fn a0(&self) -> &SparseSymMatrix {
        &self.a0
    }

    /// `B_i`, `1 <= i <= len()`.
    pub fn b(&self, i: usize) -> &SparseSymMatrix {
        &self.levels[i - 1].b
    }

    pub fn factor(&self, i: usize) -> &PartialCholFactor {
        &self.levels[i - 1].factor
    }

    /// `A_i`, `0 <= i <= len()`.
    pub fn a(&self, i: usize) -> &SparseSymMatrix {
        if i == 0 {
            &self.a0
        } else {
            self.levels[i - 1].factor.reduced()
        }
    }

    pub fn level_params(&self, i: usize) -> Option<ChebyParams> {
        self.levels[i - 1].cheby
    }

    pub fn top_window(&self) -> (f64, f64) {
        self.top
    }

    /// Top-level Chebyshev parameters for accuracy `eps`.
    pub fn top_params(&self, eps: f64) -> ChebyParams {
        match self.policy {
            BoundsPolicy::Analytic if !self.is_empty() => {
                let t = (0.67 * self.k.sqrt() * (2.0 / eps).ln()).ceil().max(1.0) as usize;
                ChebyParams { lambda_min: self.top.0, lambda_max: self.top.1, t }
            }
            _ => ChebyParams::for_accuracy(self.top.0, self.top.1, eps),
        }
    }

    pub fn summary(&self) -> ChainSummary {
        let (base, base_dim) = match &self.base {
            Base::Empty => (BaseKind::Empty, 0),
            Base::Dense(f) => (BaseKind::Dense, f.n()),
            Base::Iterative(a) => (BaseKind::Iterative, a.n()),
        };
        ChainSummary {
            n: self.a0.n(),
            levels: self.len(),
            chi: self.chi,
            k: self.k,
            base_dim_threshold: self.base_dim_threshold,
            base,
            base_dim,
            top_lambda: self.top,
            level_stats: self.levels.iter().map(|l| l.stats.clone()).collect(),
            seed: self.seed,
        }
    }

    /// Whether `Solve_{B_i}` is an exact pseudo-inverse of `B_i`.
    fn exact_from(&self, i: usize) -> bool {
        i == self.len() && !matches!(self.base, Base::Iterative(_))
    }

    fn set_bounds(&mut self, rng: &mut ChaCha8Rng) {
        let l = self.len();
        // windows for (A_i, Solve_{B_{i+1}}), deepest first; index l-1 .. 0
        for i in (0..l).rev() {
            let window = match self.policy {
                BoundsPolicy::Analytic => {
                    let p = ChebyParams::level_default(self.k);
                    (p.lambda_min, p.lambda_max)
                }
                BoundsPolicy::Estimated { safety, steps } => self.estimate(i, safety, steps, rng),
            };
            if i == 0 {
                self.top = window;
            } else {
                let params = match self.policy {
                    BoundsPolicy::Analytic => ChebyParams::level_default(self.k),
                    BoundsPolicy::Estimated { .. } => ChebyParams::for_accuracy(window.0, window.1, level_eps()),
                };
                self.levels[i - 1].cheby = Some(params);
                self.levels[i - 1].stats.cheby = Some(params);
            }
        }
        if l == 0 {
            self.top = (1.0, 1.0);
        }
    }

    /// Window for `Solve_{B_{i+1}} A_i`. Since `B_{i+1} <= A_i`, the
    /// spectrum starts at 1 for an exact solve and at `1 - 2e^-2` otherwise.
    fn estimate(&self, i: usize, safety: f64, steps: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let lo = if self.exact_from(i + 1) { 1.0 } else { level_lambda_min() };
        let a = self.a(i);
        let m = LevelSolve { chain: self, i: i + 1 };
        let mut x: Vec<f64> = (0..a.n()).map(|_| StandardNormal.sample(rng)).collect();
        if self.factor(i + 1).projection() {
            project_out_ones(&mut x);
        }
        let hi = match lanczos_extremes(a, &m, &x, steps.min(a.n())) {
            Some((_, hi, true)) if self.exact_from(i + 1) => hi * (1.0 + 1e-9),
            Some((_, hi, _)) => hi * safety,
            None => lo,
        };
        (lo, hi.max(lo))
    }

    /// `Solve_{B_i}(b)`, `1 <= i <= len()`.
    pub fn solve_level(&self, i: usize, b: &[f64]) -> Result<Vec<f64>> {
        if i == 0 || i > self.len() {
            return Err(SddError::OutOfRange(format!("level {i} not in 1..={}", self.len())));
        }
        let n = self.factor(i).n();
        if b.len() != n {
            return Err(SddError::DimensionMismatch { expected: n, got: b.len() });
        }
        Ok(self.level_apply(i, b))
    }

    fn level_apply(&self, i: usize, b: &[f64]) -> Vec<f64> {
        let inner = LevelInner { chain: self, i };
        self.factor(i).apply_pinv(&inner, b).expect("dimensions fixed at build time")
    }

    /// The preconditioner for `A_0`: `Solve_{B_1}`, or the base solver when
    /// the chain is empty.
    pub fn preconditioner(&self) -> impl LinearOperator + '_ {
        TopPrecond { chain: self }
    }

    /// Approximates `A_0^+ b` with `t` top-level Chebyshev iterations.
    pub fn apply(&self, b: &[f64], params: ChebyParams) -> Result<Vec<f64>> {
        if b.len() != self.dim() {
            return Err(SddError::DimensionMismatch { expected: self.dim(), got: b.len() });
        }
        if self.is_empty() {
            return Ok(self.base_apply(b));
        }
        let m = LevelSolve { chain: self, i: 1 };
        precond_cheby(&self.a0, b, params.t, &m, params.lambda_min, params.lambda_max)
    }

    fn base_apply(&self, b: &[f64]) -> Vec<f64> {
        match &self.base {
            Base::Empty => Vec::new(),
            Base::Dense(f) => f.apply(b),
            Base::Iterative(a) => {
                let mut rhs = b.to_vec();
                let singular = classify(a).kind == MatrixKind::Laplacian;
                if singular {
                    project_out_ones(&mut rhs);
                }
                let jacobi = JacobiOp(a.diag().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 }).collect());
                let mut x = pcg(a, &jacobi, &rhs, None, 1e-13, 20 * a.n()).map(|o| o.x).unwrap_or_else(|_| vec![0.0; a.n()]);
                if singular {
                    project_out_ones(&mut x);
                }
                x
            }
        }
    }
}

pub(crate) struct JacobiOp(pub(crate) Vec<f64>);

impl LinearOperator for JacobiOp {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, xi), di) in y.iter_mut().zip(x).zip(&self.0) {
            *yi = xi * di;
        }
    }
}

/// `Solve_{B_i}` as an operator.
struct LevelSolve<'a> {
    chain: &'a SolverChain,
    i: usize,
}

impl LinearOperator for LevelSolve<'_> {
    fn dim(&self) -> usize {
        self.chain.factor(self.i).n()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.chain.level_apply(self.i, x));
    }
}

/// The operator applied to the reduced block inside `Solve_{B_i}`.
struct LevelInner<'a> {
    chain: &'a SolverChain,
    i: usize,
}

impl LinearOperator for LevelInner<'_> {
    fn dim(&self) -> usize {
        self.chain.a(self.i).n()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let c = self.chain;
        if self.i == c.len() {
            y.copy_from_slice(&c.base_apply(x));
            return;
        }
        let p = c.levels[self.i - 1].cheby.expect("inner levels carry Chebyshev parameters");
        let m = LevelSolve { chain: c, i: self.i + 1 };
        let out = precond_cheby(c.a(self.i), x, p.t, &m, p.lambda_min, p.lambda_max).expect("validated parameters");
        y.copy_from_slice(&out);
    }
}

struct TopPrecond<'a> {
    chain: &'a SolverChain,
}

impl LinearOperator for TopPrecond<'_> {
    fn dim(&self) -> usize {
        self.chain.dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        if self.chain.is_empty() {
            y.copy_from_slice(&self.chain.base_apply(x));
        } else {
            y.copy_from_slice(&self.chain.level_apply(1, x));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use crate::sparsify::SparsifierChoice;
    use crate::spectral::{generalized_spectrum, materialize};

    fn grid(k: usize) -> SparseSymMatrix {
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
        laplacian_of(&WeightedGraph::from_edges(k * k, e).unwrap())
    }

    #[test]
    fn params_clamped() {
        let cfg = ChainConfig::default();
        let (chi, k, thr) = chain_params(100_000, &cfg);
        assert!(k <= 100_000.0 + 1e-6);
        assert!((chi - (100_000f64.sqrt() - 1.0) / 14.0).abs() < 1e-12);
        assert_eq!(thr, 512);
        let (_, k, thr) = chain_params(400, &cfg);
        assert!(k <= 400.0 + 1e-9);
        assert_eq!(thr, (66.0 * (19.0 / 14.0) + 6.0f64).ceil() as usize);
    }

    #[test]
    fn small_matrix_has_empty_chain() {
        let a = grid(3);
        let c = build_preconditioners(&a, &ChainConfig::default()).unwrap();
        assert!(c.is_empty());
        let b = vec![1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let x = c.apply(&b, c.top_params(1e-8)).unwrap();
        let ax = a.apply(&x).unwrap();
        for i in 0..9 {
            assert!((ax[i] - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn tree_is_its_own_preconditioner() {
        let g = WeightedGraph::from_edges(200, (1..200).map(|i| (i, (i - 1) / 2, 1.0 + (i % 3) as f64))).unwrap();
        let a = laplacian_of(&g);
        let c = build_preconditioners(&a, &ChainConfig::default()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.b(1), &a);
        assert_eq!(c.a(1).n(), 0);
    }

    #[test]
    fn grid_chain_decreases() {
        let a = grid(20);
        let cfg = ChainConfig { base_dim_threshold: Some(20), ..Default::default() };
        let c = build_preconditioners(&a, &cfg).unwrap();
        assert!(!c.is_empty());
        for i in 1..=c.len() {
            assert!(c.a(i).n() < c.a(i - 1).n());
            assert_eq!(c.b(i).n(), c.a(i - 1).n());
        }
    }

    #[test]
    fn level_solve_operator_properties() {
        let a = grid(5);
        let cfg = ChainConfig {
            base_dim_threshold: Some(4),
            ultra: UltraConfig { sparsifier: SparsifierChoice::Identity, budget: UltraBudget::OffTreeFraction(0.6), ..Default::default() },
            ..Default::default()
        };
        let c = build_preconditioners(&a, &cfg).unwrap();
        assert!(c.len() >= 2, "want a recursive level, got {}", c.len());
        let s = materialize(25, |b| c.solve_level(1, b).unwrap());
        assert!((&s - s.transpose()).amax() < 1e-8);
        let b1 = c.b(1).to_dense();
        let ev = generalized_spectrum(&b1, &crate::spectral::pinv(&s)).unwrap();
        let eps = level_eps();
        for l in ev {
            assert!(l >= 1.0 - eps - 1e-6 && l <= 1.0 + eps + 1e-6, "{l}");
        }
        // all-ones is annihilated
        let y = c.solve_level(1, &[1.0; 25]).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-10));
    }
}
