//! Compares spanning-tree strategies by total stretch, the quantity that
//! bounds how well a tree preconditions its graph.
//!
//!     cargo run --release --example spanning_trees

use sddsolve::gen::{grid2d, random_weighted};
use sddsolve::tree::{build_tree, compute_stretch, TreeStrategy};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let graphs = [("grid 32x32", grid2d(32, 32)), ("random n=1000", random_weighted(1000, 2000, 10.0, 7))];
    for (name, g) in &graphs {
        println!("{name}: n = {}, m = {}", g.n(), g.m());
        for s in [TreeStrategy::MaxWeightSpanning, TreeStrategy::ShortestPathByResistance, TreeStrategy::ClusterLowStretch] {
            let t = build_tree(g, s)?;
            let table = compute_stretch(&t, g.edges());
            println!(
                "  {s:?}: total stretch {:.1} (mean {:.2}), root {}",
                table.total_stretch(),
                table.total_stretch() / g.m() as f64,
                t.root()
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
