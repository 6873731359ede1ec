//! Linear operators for staggered-grid image reconstruction: the
//! forward-difference gradient, the four half-pixel lattice alignment
//! operators, the unitary DFT with masked frequency sampling, quarter-turn
//! rotations of all object types, dense matrix oracles, and power-iteration
//! norm estimates.
//!
//! Every forward/adjoint pair in this crate is an *exact* matrix transpose
//! pair: adjoint tests hold near machine precision and the dense
//! materialisations match bitwise (stencil weights are all `k/4`).

pub mod dense;
pub mod fourier;
pub mod grad;
pub mod lattice;
pub mod norms;
pub mod rotate;

pub use fourier::{c_norm_sq, mask_complex, re_dot, Dft2, SamplingOp};
pub use grad::{gradient, gradient_adjoint};
pub use lattice::{align, align_adjoint, align_adjoint_sum, Lattice};
pub use rotate::{
    kspace_rot90, rotate90, rotate90_k, rotate_field_aligned, rotate_field_offset,
    rotate_field_staggered, rotate_split_fields, rotated_lattice,
};
