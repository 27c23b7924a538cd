//! Times the recursive solver on square grids and prints the chain shape.
//!
//!     cargo run --release --example scaling -- 64 128 256

use std::time::Instant;

use sddsolve::gen::grid2d;
use sddsolve::graph::laplacian_of;
use sddsolve::solve::{solve, SolveConfig};

pub fn run_sizes(sides: &[usize]) -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>8} {:>7} {:>6} {:>6} {:>10} {:>10} {:>10}", "n", "levels", "outer", "refine", "build_s", "total_s", "residual");
    for &k in sides {
        let a = laplacian_of(&grid2d(k, k));
        let n = a.n();
        let b: Vec<f64> = (0..n).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let started = Instant::now();
        let cfg = SolveConfig { residual_tol: Some(1e-6), ..Default::default() };
        let (_, rep) = solve(&a, &b, 1e-6, &cfg)?;
        let chain = &rep.chains[0];
        println!(
            "{:>8} {:>7} {:>6} {:>6} {:>10.3} {:>10.3} {:>10.2e}",
            n,
            chain.levels,
            rep.outer_iterations,
            rep.refinements,
            rep.timings.build_ms / 1e3,
            started.elapsed().as_secs_f64(),
            rep.residual_achieved
        );
        for (i, l) in chain.level_stats.iter().enumerate() {
            println!(
                "    level {}: dim {} extra {} -> reduced {} (noff {}), cheby {:?}",
                i + 1,
                l.dim,
                l.extra_edges,
                l.reduced_dim,
                l.reduced_noff,
                l.cheby.map(|p| (p.lambda_max, p.t))
            );
        }
        println!("    top window {:?}, status {:?}", chain.top_lambda, rep.status);
    }
    Ok(())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    run_sizes(&[16, 32])
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sides: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    run_sizes(if sides.is_empty() { &[64, 128, 256] } else { &sides })
}
