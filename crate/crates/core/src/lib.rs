//! Low-rank matrix recovery by greedy atomic decomposition.
//!
//! The crate recovers a rank-`r` matrix `X` from linear measurements
//! `b = A(X) + ν` with an iterative pursuit over rank-one atoms: each round
//! selects the `2r` leading singular atoms of the back-projected residual,
//! merges them with the current `r` atoms, solves a least-squares problem on
//! their span and prunes back to the best rank-`r` approximation.
//!
//! Modules:
//! - [`linalg`]: dense/factored matrices, full and Lanczos truncated SVD.
//! - [`operators`]: measurement operators (Gaussian ensemble, entry
//!   sampling) and Monte Carlo restricted-isometry estimates.
//! - [`solver`]: the pursuit itself, its least-squares step and rank search.
//! - [`baseline`]: singular value thresholding for comparison.
//! - [`analysis`]: error budgets, atomic bands, iteration bounds, SNR.
//! - [`experiment`]: problem generation and the sweep drivers behind the CLI.

pub mod analysis;
pub mod baseline;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod operators;
pub mod par;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
