//! Self-similarity frame built by block matching: grouped patches are
//! transformed by an orthonormal 2-D DCT and a 1-D Haar transform along
//! each group, giving an (overcomplete) analysis/synthesis pair with
//! `Ψ Φ = I` exactly.  Shrinking the coefficients by hard thresholding
//! implements the sparsity step of the reconstruction solvers.

pub mod codebook;
pub mod transform;

pub use codebook::{Codebook, FrameParams, Group};
