//! Symbolic-numeric invariants of B-type Landau-Ginzburg models: Jacobi
//! algebras, Koszul cohomology, matrix factorizations, hyperplane
//! arrangement topology and theta-function factorizations.

pub mod arrangement;
pub mod cli;
pub mod critical;
pub mod expr;
pub mod factorization;
pub mod koszul;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod theta;
