//! Truncated monomial-basis matrices of weighted composition-differentiation
//! operators `D^m_{u,phi} f = u * f^(m)(phi)` on the Hardy space H2, with
//! closed-form class checks cross-validated against brute-force matrix
//! computations.

pub mod classify;
pub mod cli;
pub mod error;
pub mod function;
pub mod operators;
pub mod report;
pub mod series;
pub mod spectral;
pub mod suite;

pub use error::{Error, Result};
pub use num_complex::Complex64;
