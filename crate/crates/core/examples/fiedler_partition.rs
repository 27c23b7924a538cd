//! Approximate Fiedler vector of a dumbbell graph; its sign pattern
//! separates the two halves.
//!
//!     cargo run --release --example fiedler_partition

use sddsolve::chain::ChainConfig;
use sddsolve::fiedler::approx_fiedler;
use sddsolve::graph::{laplacian_of, WeightedGraph};
use sddsolve::spectral::lambda2;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    // two 6x6 grids joined by one light edge
    let side = 6;
    let half = side * side;
    let mut e = Vec::new();
    for off in [0, half] {
        for r in 0..side {
            for c in 0..side {
                let v = off + r * side + c;
                if c + 1 < side {
                    e.push((v, v + 1, 1.0));
                }
                if r + 1 < side {
                    e.push((v, v + side, 1.0));
                }
            }
        }
    }
    e.push((half - 1, half, 0.1));
    let a = laplacian_of(&WeightedGraph::from_edges(2 * half, e)?);
    let r = approx_fiedler(&a, 0.1, 0.25, &ChainConfig::default())?;
    let exact = lambda2(&a.to_dense());
    let left = r.v[..half].iter().filter(|&&x| x < 0.0).count();
    let right = r.v[half..].iter().filter(|&&x| x < 0.0).count();
    println!("rayleigh {:.6} vs lambda_2 {:.6} ({} trials x {} steps)", r.rayleigh, exact, r.trials, r.iterations);
    println!("negative entries: {left}/{half} on the left, {right}/{half} on the right");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
