//! Command-line front end: `solve`, `fiedler`, `precondition` and `bench`.
//!
//! Exit codes: 0 on success (verified), 2 when a solve could not be
//! verified, 1 on input errors.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::chain::ChainConfig;
use crate::error::{Result, SddError};
use crate::fiedler::approx_fiedler;
use crate::gen;
use crate::graph::{laplacian_of, WeightedGraph};
use crate::io::{format_edge_list, format_vector, parse_vector, read_matrix, write_text, MatrixFormat, MatrixInput};
use crate::matrix::SparseSymMatrix;
use crate::solve::{solve, SolveConfig, SolveMode, SolveReport, SolveStatus};
use crate::sparsify::SparsifierChoice;
use crate::spectral::{finite_condition_number, ORACLE_CAP};
use crate::tree::{build_tree, compute_stretch, TreeStrategy};
use crate::ultra::{ultra_simple, ultra_sparsify, UltraBudget, UltraConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sddsolve", version, about = "Solvers for symmetric diagonally-dominant systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve A x = b.
    Solve(SolveArgs),
    /// Approximate Fiedler vector of a graph.
    Fiedler(FiedlerArgs),
    /// Build a tree-plus-edges preconditioner for a graph.
    Precondition(PreconditionArgs),
    /// Time solver modes on generated instances.
    Bench(BenchArgs),
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// Matrix Market (`.mtx`) file or edge list (Laplacian of the graph).
    #[arg(long)]
    pub matrix: PathBuf,
    /// Vector file, or `ones` / `random`.
    #[arg(long)]
    pub rhs: String,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "recursive")]
    pub mode: SolveMode,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub chi: Option<f64>,
    #[arg(long)]
    pub tree: Option<TreeStrategy>,
    #[arg(long)]
    pub sparsifier: Option<SparsifierChoice>,
    #[arg(long)]
    pub presparsify: bool,
    /// Also require this relative residual.
    #[arg(long)]
    pub residual_tol: Option<f64>,
    /// Worker threads; every section currently runs on one.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, clap::Args)]
pub struct FiedlerArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.25)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecondMethod {
    UltraSimple,
    UltraSparsify,
}

#[derive(Debug, clap::Args)]
pub struct PreconditionArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Target condition number (ultra-sparsify).
    #[arg(long)]
    pub k: Option<f64>,
    /// Decomposition budget (ultra-simple).
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_enum, default_value = "ultra-sparsify")]
    pub method: PrecondMethod,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Append the measured condition number and its bound (small graphs).
    #[arg(long)]
    pub kappa: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tree: Option<TreeStrategy>,
    #[arg(long)]
    pub sparsifier: Option<SparsifierChoice>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Grid2d,
    Path,
    RandomRegular,
    RandomWeighted,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Comma-separated sizes (grid side length for `grid2d`, else `n`).
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "recursive")]
    pub modes: Vec<SolveMode>,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let out = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Fiedler(a) => cmd_fiedler(&a),
        Command::Precondition(a) => cmd_precondition(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match out {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn read_graph(path: &Path) -> Result<WeightedGraph> {
    match read_matrix(path, MatrixFormat::EdgeList)? {
        MatrixInput::Graph(g) => Ok(g),
        MatrixInput::Matrix(_) => unreachable!("edge-list reader yields graphs"),
    }
}

fn rhs_for(spec: &str, n: usize, seed: u64) -> Result<Vec<f64>> {
    match spec {
        "ones" => Ok(vec![1.0; n]),
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
        }
        path => parse_vector(&std::fs::read_to_string(path)?),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32> {
    let a = read_matrix(&args.matrix, MatrixFormat::from_path(&args.matrix))?.into_matrix();
    let b = rhs_for(&args.rhs, a.n(), args.seed)?;
    let mut cfg = SolveConfig { mode: args.mode, residual_tol: args.residual_tol, ..Default::default() };
    cfg.chain.seed = args.seed;
    cfg.chain.k = args.k;
    cfg.chain.chi = args.chi;
    cfg.chain.presparsify = args.presparsify;
    if let Some(t) = args.tree {
        cfg.chain.ultra.tree = t;
    }
    if let Some(s) = args.sparsifier {
        cfg.chain.ultra.sparsifier = s;
    }
    let (x, report) = solve(&a, &b, args.eps, &cfg)?;
    if let Some(p) = &args.out {
        write_text(p, &format_vector(&x))?;
    }
    if let Some(p) = &args.report {
        write_text(p, &report_json(&report)?)?;
    }
    eprintln!(
        "{:?}: n = {}, residual {:.3e}, error estimate {:.3e}, {} outer iterations, {:.1} ms",
        report.status, report.n, report.residual_achieved, report.error_estimate, report.outer_iterations, report.timings.total_ms
    );
    Ok(match report.status {
        SolveStatus::Verified => EXIT_OK,
        SolveStatus::Flagged => EXIT_FLAGGED,
    })
}

/// Pretty JSON with keys in declaration order.
pub fn report_json(report: &SolveReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| SddError::Io(e.to_string()))
}

pub fn parse_report(text: &str) -> Result<SolveReport> {
    serde_json::from_str(text).map_err(|e| SddError::Parse { line: e.line(), msg: e.to_string() })
}

pub fn cmd_fiedler(args: &FiedlerArgs) -> Result<i32> {
    let g = read_graph(&args.graph)?;
    if !g.is_connected() {
        return Err(SddError::Disconnected { components: crate::graph::connected_components(&g).len() });
    }
    let cfg = ChainConfig { seed: args.seed, ..Default::default() };
    let r = approx_fiedler(&laplacian_of(&g), args.eps, args.p, &cfg)?;
    if let Some(p) = &args.out {
        write_text(p, &format!("# rayleigh {:e}\n{}", r.rayleigh, format_vector(&r.v)))?;
    }
    println!("rayleigh {:e} trials {} iterations {}", r.rayleigh, r.trials, r.iterations);
    Ok(EXIT_OK)
}

pub fn cmd_precondition(args: &PreconditionArgs) -> Result<i32> {
    let g = read_graph(&args.graph)?;
    if !g.is_connected() {
        return Err(SddError::Disconnected { components: crate::graph::connected_components(&g).len() });
    }
    let strategy = args.tree.unwrap_or_default();
    let (u, bound) = match args.method {
        PrecondMethod::UltraSimple => {
            let t = args.t.ok_or_else(|| SddError::Precondition("--t is required for ultra-simple".into()))?;
            let tree = build_tree(&g, strategy)?;
            let eta = compute_stretch(&tree, g.edges()).eta_total;
            (ultra_simple(&g, t, strategy)?, 12.0 * eta / t)
        }
        PrecondMethod::UltraSparsify => {
            let k = args.k.ok_or_else(|| SddError::Precondition("--k is required for ultra-sparsify".into()))?;
            let cfg = UltraConfig {
                tree: strategy,
                budget: UltraBudget::default(),
                sparsifier: args.sparsifier.unwrap_or_default(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (ultra_sparsify(&g, k, &cfg, &mut rng)?.graph(), k)
        }
    };
    let mut text = format_edge_list(&u);
    if args.kappa {
        if g.n() > ORACLE_CAP {
            return Err(SddError::OracleCap { n: g.n(), cap: ORACLE_CAP });
        }
        let kappa = finite_condition_number(&laplacian_of(&g), &laplacian_of(&u))?;
        let line = format!("# kappa {kappa:e} bound {bound:e}\n");
        print!("{line}");
        text.push_str(&line);
    }
    match &args.out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BenchRow {
    pub size: usize,
    pub n: usize,
    pub m: usize,
    pub mode: SolveMode,
    pub iterations: usize,
    pub seconds: f64,
    pub error_estimate: f64,
    pub residual: f64,
    pub status: SolveStatus,
}

pub fn bench_instance(family: Family, size: usize, seed: u64) -> Result<SparseSymMatrix> {
    let g = match family {
        Family::Grid2d => gen::grid2d(size, size),
        Family::Path => gen::path(size),
        Family::RandomRegular => gen::random_regular(size, 3 + (size % 2), seed)?,
        Family::RandomWeighted => gen::random_weighted(size, size, 100.0, seed),
    };
    Ok(laplacian_of(&g))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32> {
    let mut rows = Vec::new();
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{:>8} {:>9} {:>10} {:>11} {:>10} {:>11} {:>11}  status", "size", "n", "mode", "iterations", "seconds", "error_est", "residual");
    for &size in &args.sizes {
        let a = bench_instance(args.family, size, args.seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let b: Vec<f64> = (0..a.n()).map(|_| StandardNormal.sample(&mut rng)).collect();
        for &mode in &args.modes {
            let mut cfg = SolveConfig { mode, ..Default::default() };
            cfg.chain.seed = args.seed;
            let started = Instant::now();
            let (_, rep) = solve(&a, &b, args.eps, &cfg)?;
            let row = BenchRow {
                size,
                n: a.n(),
                m: a.noff(),
                mode,
                iterations: rep.outer_iterations + rep.fallback_iterations,
                seconds: started.elapsed().as_secs_f64(),
                error_estimate: rep.error_estimate,
                residual: rep.residual_achieved,
                status: rep.status,
            };
            let _ = writeln!(
                stdout,
                "{:>8} {:>9} {:>10} {:>11} {:>10.4} {:>11.3e} {:>11.3e}  {:?}",
                row.size, row.n, row.mode.to_string(), row.iterations, row.seconds, row.error_estimate, row.residual, row.status
            );
            rows.push(row);
        }
    }
    if let Some(p) = &args.report {
        let json = serde_json::to_string_pretty(&rows).map_err(|e| SddError::Io(e.to_string()))?;
        write_text(p, &json)?;
    }
    Ok(if rows.iter().all(|r| r.status == SolveStatus::Verified) { EXIT_OK } else { EXIT_FLAGGED })
}
