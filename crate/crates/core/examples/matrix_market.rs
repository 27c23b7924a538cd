//! Writes a matrix in Matrix Market form, reads it back and solves with
//! it, as the command-line tool does.
//!
//!     cargo run --release --example matrix_market

use sddsolve::gen::random_sddm;
use sddsolve::io::{format_matrix_market, format_vector, parse_matrix_market, parse_vector};
use sddsolve::solve::{solve, SolveConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let a = random_sddm(500, 1000, false, 9);
    let text = format_matrix_market(&a);
    println!("{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    let back = parse_matrix_market(&text)?;
    assert_eq!(back, a);
    let (x, rep) = solve(&back, &vec![1.0; a.n()], 1e-10, &SolveConfig::default())?;
    let x2 = parse_vector(&format_vector(&x))?;
    assert_eq!(x, x2);
    println!("... {} lines; solved with status {:?}, residual {:.2e}", text.lines().count(), rep.status, rep.residual_achieved);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
