//! Branching-Toeplitz kernels, PSD testing and the `q`-HPD classification.

mod construct;
mod matrix;
mod sequence;

pub use construct::{branching_kernel, branching_toeplitz, cantor_gram, markov_product, CantorGram};
pub use matrix::{psd_check, HermitianMatrix, MatrixJson, PsdReport, HERMITIAN_TOL, PSD_TOL};
pub use sequence::{
    alpha_from_measure, hpd_check, modulate, spectral_toeplitz, toeplitz, HpdMethod, HpdReport, HpdSequence,
    HpdSequenceJson, ScalarJson, TreeOracle, DECAY_TOL,
};
