//! Solves a grid Laplacian system with each solver mode and checks the
//! answer against the residual.
//!
//!     cargo run --release --example solve_grid

use sddsolve::gen::grid2d;
use sddsolve::graph::laplacian_of;
use sddsolve::solve::{solve, SolveConfig, SolveMode};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let a = laplacian_of(&grid2d(40, 40));
    // a dipole: current in at one corner, out at the other
    let mut b = vec![0.0; a.n()];
    b[0] = 1.0;
    b[a.n() - 1] = -1.0;
    for mode in [SolveMode::Recursive, SolveMode::OneLevel, SolveMode::PcgTree] {
        let cfg = SolveConfig { mode, ..Default::default() };
        let (x, rep) = solve(&a, &b, 1e-8, &cfg)?;
        println!(
            "{mode:>10}: {:?}, effective resistance {:.6}, {} iterations, residual {:.2e}",
            rep.status,
            x[0] - x[a.n() - 1],
            rep.outer_iterations + rep.fallback_iterations,
            rep.residual_achieved
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
