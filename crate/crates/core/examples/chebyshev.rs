//! Preconditioned Chebyshev with a tree preconditioner: a fixed number of
//! iterations gives a fixed linear operator, unlike conjugate gradients.
//!
//!     cargo run --release --example chebyshev

use sddsolve::cheby::{lanczos_extremes, pcg, precond_cheby, ChebyParams};
use sddsolve::cholesky::partial_cholesky;
use sddsolve::gen::grid2d;
use sddsolve::graph::laplacian_of;
use sddsolve::operator::{project_out_ones, FnOperator, Identity};
use sddsolve::tree::{build_tree, TreeStrategy};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let g = grid2d(30, 30);
    let a = laplacian_of(&g);
    let t = laplacian_of(&build_tree(&g, TreeStrategy::default())?.to_graph());
    let f = partial_cholesky(&t)?;
    let m = FnOperator::new(a.n(), |x: &[f64], y: &mut [f64]| y.copy_from_slice(&f.apply_pinv(&Identity(0), x).unwrap()));
    let mut b: Vec<f64> = (0..a.n()).map(|i| ((i * 31) % 17) as f64).collect();
    project_out_ones(&mut b);
    let (_, hi, _) = lanczos_extremes(&a, &m, &b, 60).ok_or("no spectrum estimate")?;
    let hi = 1.2 * hi;
    println!("tree-preconditioned spectrum lies in [1, ~{hi:.1}]");
    for eps in [1e-2, 1e-4, 1e-8] {
        let p = ChebyParams::for_accuracy(1.0, hi, eps);
        let x = precond_cheby(&a, &b, p.t, &m, 1.0, hi)?;
        let r = a.apply(&x)?;
        let rel = r.iter().zip(&b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt() / b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cg = pcg(&a, &m, &b, None, eps, 10_000)?;
        println!("  eps {eps:.0e}: chebyshev t = {:>4}, residual {rel:.2e}; pcg {} iterations", p.t, cg.iterations);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
