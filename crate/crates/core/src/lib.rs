//! Solvers for symmetric diagonally-dominant linear systems built on
//! combinatorial preconditioners: low-stretch spanning trees augmented into
//! ultra-sparsifiers, partial Cholesky elimination, and a recursive chain of
//! preconditioned Chebyshev iterations. Also computes approximate Fiedler
//! vectors by inverse power iteration through the same chain.

pub mod chain;
pub mod cheby;
pub mod cholesky;
pub mod cli;
pub mod decompose;
pub mod error;
pub mod fiedler;
pub mod gen;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod operator;
pub mod solve;
pub mod sparsify;
pub mod spectral;
pub mod tree;
pub mod ultra;

pub use error::{Result, SddError};
pub use graph::{Edge, WeightedGraph};
pub use matrix::{MatrixClass, MatrixKind, SparseSymMatrix};
