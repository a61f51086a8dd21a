//! Fundamental solutions and Cauchy problems for the equation
//! `D^{α,β}_y u − (−1)^{n−1} ∂^{2n}_x u = 0` with a Hilfer time derivative,
//! together with self-similar solutions of a degenerate two-operator
//! fractional equation and the numerical oracles used to verify them.

pub mod cauchy;
pub mod cli;
pub mod error;
pub mod fracops;
pub mod kernel;
pub mod quad;
pub mod selfsim;
pub mod specfun;

pub use error::{Error, Result};
