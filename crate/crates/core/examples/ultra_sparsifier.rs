//! Builds ultra-sparsifiers at several decomposition budgets and checks the
//! sandwich `U <= G <= kappa U` with a dense eigensolve.
//!
//!     cargo run --release --example ultra_sparsifier

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sddsolve::gen::random_weighted;
use sddsolve::graph::laplacian_of;
use sddsolve::spectral::generalized_spectrum;
use sddsolve::ultra::{ultra_sparsify, UltraBudget, UltraConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let g = random_weighted(150, 450, 10.0, 3);
    let lg = laplacian_of(&g).to_dense();
    println!("random graph: n = {}, m = {}", g.n(), g.m());
    for budget in [UltraBudget::default(), UltraBudget::OffTreeFraction(0.5), UltraBudget::OffTreeFraction(0.1)] {
        let cfg = UltraConfig { budget, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let u = ultra_sparsify(&g, 25.0, &cfg, &mut rng)?;
        let ev = generalized_spectrum(&lg, &laplacian_of(&u.graph()).to_dense())?;
        println!(
            "  {budget:?}: t = {:.1}, {} extra edges, spectrum of (G, U) in [{:.4}, {:.2}]",
            u.stats.t,
            u.extra_edges.len(),
            ev[0],
            ev[ev.len() - 1]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
