//! Eliminates the degree-one and degree-two vertices of a sparse
//! preconditioner and applies its pseudo-inverse through the factor.
//!
//!     cargo run --release --example partial_cholesky

use sddsolve::cholesky::{ldl_base, partial_cholesky};
use sddsolve::gen::random_weighted;
use sddsolve::graph::laplacian_of;
use sddsolve::operator::project_out_ones;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    // a tree plus 20 extra edges
    let g = random_weighted(2000, 20, 4.0, 11);
    let b = laplacian_of(&g);
    let f = partial_cholesky(&b)?;
    let a1 = f.reduced();
    println!("n = {}, m = {}: eliminated {}, reduced system {} x {} with {} off-diagonals", g.n(), g.m(), f.eliminated_count(), a1.n(), a1.n(), a1.noff());
    let base = ldl_base(a1)?;
    let mut rhs: Vec<f64> = (0..g.n()).map(|i| (i % 7) as f64).collect();
    project_out_ones(&mut rhs);
    let x = f.apply_pinv(&base, &rhs)?;
    let bx = b.apply(&x)?;
    let err = bx.iter().zip(&rhs).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    println!("max |B x - b| = {err:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
