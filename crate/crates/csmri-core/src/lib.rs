//! Core containers, conventions, and file formats for the reconstruction
//! toolkit.
//!
//! # Conventions
//!
//! * Images are square `n × n` arrays of `f64`, stored row-major. The first
//!   index is the image row `i` (top to bottom), the second the column `j`
//!   (left to right). Code indexes from 0; documentation quotes stencil
//!   formulas in the customary 1-based `(i, j)` form and says so when it does.
//! * k-space arrays use the same layout with the zero-frequency sample at
//!   index `(0, 0)` (standard DFT ordering, no shift).
//! * Gradient-like quantities are [`GradientField`]s: a pair of `n × n`
//!   channels, channel 1 holding vertical (row-direction) components and
//!   channel 2 horizontal (column-direction) components.
//!
//! # Boundary convention for gradient fields
//!
//! Consumers of a [`GradientField`] treat channel 1's last row and channel
//! 2's last column as structurally zero: forward differences with Neumann
//! boundary produce zeros there, and every operator in the toolkit that
//! writes a field writes zeros to those positions. The accessors on
//! [`GradientField`] do not enforce this — operators do.

pub mod error;
pub mod field;
pub mod io;
pub mod validate;

pub use error::{Error, Result};
pub use field::GradientField;

use num_complex::Complex64;

/// A real-valued square image, `n × n`, row-major.
pub type RealImage = ndarray::Array2<f64>;

/// A complex-valued square array (k-space data or intermediate spectra).
pub type ComplexImage = ndarray::Array2<Complex64>;

/// A binary k-space sampling mask in standard DFT layout (DC at `(0, 0)`).
pub type Mask = ndarray::Array2<bool>;
