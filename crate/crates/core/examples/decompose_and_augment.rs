//! Splits a spanning tree into pieces of bounded stretch mass, then adds
//! one bridge edge per pair of pieces and measures the resulting condition
//! number against its bound.
//!
//!     cargo run --release --example decompose_and_augment

use sddsolve::decompose::decompose;
use sddsolve::gen::grid2d;
use sddsolve::graph::laplacian_of;
use sddsolve::spectral::finite_condition_number;
use sddsolve::tree::{build_tree, compute_stretch, TreeStrategy};
use sddsolve::ultra::ultra_simple;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let g = grid2d(10, 10);
    let t = build_tree(&g, TreeStrategy::default())?;
    let table = compute_stretch(&t, g.edges());
    println!("grid 10x10, eta(E) = {:.1}", table.eta_total);
    for budget in [4.0, 8.0, 16.0, 32.0] {
        let d = decompose(&t, g.edges(), &table.eta, budget)?;
        let heaviest = (0..d.h())
            .filter(|&i| d.sets[i].len() > 1)
            .map(|i| (0..d.num_edges()).filter(|&e| d.rho(e).contains(&i)).map(|e| table.eta[e]).sum::<f64>())
            .fold(0.0, f64::max);
        let u = ultra_simple(&g, budget, TreeStrategy::default())?;
        let kappa = finite_condition_number(&laplacian_of(&g), &laplacian_of(&u))?;
        println!(
            "  t = {budget:>4}: {:>3} pieces, heaviest {:.1} <= {:.1}; {} edges kept, kappa {:.2} <= {:.1}",
            d.h(),
            heaviest,
            4.0 * table.eta_total / budget,
            u.m(),
            kappa,
            12.0 * table.eta_total / budget
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
