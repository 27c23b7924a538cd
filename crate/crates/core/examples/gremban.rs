//! A diagonally dominant system with positive off-diagonal entries is
//! solved through the doubled M-matrix system.
//!
//!     cargo run --release --example gremban

use sddsolve::gen::random_sdd;
use sddsolve::matrix::classify;
use sddsolve::solve::{solve, SolveConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let a = random_sdd(300, 600, 5);
    let positive = a.off_diagonal().iter().filter(|e| e.2 > 0.0).count();
    println!("{} with {positive} positive off-diagonals out of {}", classify(&a).kind, a.noff());
    let b: Vec<f64> = (0..a.n()).map(|i| (i as f64).sin()).collect();
    let (_, rep) = solve(&a, &b, 1e-8, &SolveConfig::default())?;
    println!("doubled system: {}, status {:?}, residual {:.2e}", rep.gremban, rep.status, rep.residual_achieved);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
