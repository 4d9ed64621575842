//! Hyper-positive definite sequences on rooted trees.
//!
//! The crate builds branching-Toeplitz kernels on truncated rooted trees,
//! classifies `q`-HPD sequences through their spectral measures, simulates
//! the associated Gaussian processes, evaluates prediction distances and
//! checks two-weight Hankel inequalities on the circle.
//!
//! Each module maps to one capability:
//!
//! - [`tree`]: words over `q` generators, truncations, `Δ_n` counts.
//! - [`circle`]: spectral measures, Poisson smoothing, Riesz projections,
//!   `E_N`, Szegő means, norms.
//! - [`kernel`]: branching-Toeplitz matrices, PSD tests, Markov products,
//!   Cantor Gram factorization, the HPD check.
//! - [`process`]: Gaussian simulation and empirical covariances.
//! - [`predict`]: prediction distances and their finite oracles.
//! - [`criterion`]: the `T(q;1)` admissibility criterion and friends.
//! - [`hankel`]: Hankel operators and the inequality checks.
//! - [`cli`]: the `hpd` command-line front-end.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` lists them.

pub mod circle;
pub mod cli;
pub mod criterion;
pub mod error;
pub mod hankel;
pub mod kernel;
pub mod predict;
pub mod process;
pub mod tree;

pub use error::{Error, Result};
