//! Two-channel gradient-like fields over an `n × n` pixel grid.

use crate::RealImage;
use ndarray::Zip;

/// A pair of `n × n` real channels interpreted as a discrete vector field.
///
/// Channel 1 (`v1`) carries vertical (row-direction) components, channel 2
/// (`v2`) horizontal (column-direction) components. Pixelwise the field value
/// at `(i, j)` is the 2-vector `(v1[i][j], v2[i][j])`, and the mixed norms
/// below reduce the per-pixel Euclidean magnitudes:
///
/// * `‖v‖_{1,2} = Σ_{i,j} √(v1² + v2²)` — the sum used by the regularizers,
/// * `‖v‖_{∞,2} = max_{i,j} √(v1² + v2²)` — the dual-ball magnitude,
/// * `‖v‖_2` — the flat Euclidean norm over both channels.
///
/// Boundary convention: channel 1's last row and channel 2's last column are
/// structurally zero for fields produced by the toolkit's operators (forward
/// differences with Neumann boundary vanish there, and the half-pixel
/// operators zero those outputs explicitly). The container itself does not
/// police this; tests assert it where it matters.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    /// Vertical (row-direction) channel.
    pub v1: RealImage,
    /// Horizontal (column-direction) channel.
    pub v2: RealImage,
}

impl GradientField {
    /// The zero field on an `n × n` grid.
    pub fn zeros(n: usize) -> Self {
        GradientField {
            v1: RealImage::zeros((n, n)),
            v2: RealImage::zeros((n, n)),
        }
    }

    /// Build from the two channels. Panics if the channels are not square
    /// arrays of equal size (programming error, not input error).
    pub fn new(v1: RealImage, v2: RealImage) -> Self {
        assert_eq!(v1.dim(), v2.dim(), "gradient field channels must match");
        assert_eq!(v1.nrows(), v1.ncols(), "gradient field must be square");
        GradientField { v1, v2 }
    }

    /// Grid side length `n`.
    pub fn n(&self) -> usize {
        self.v1.nrows()
    }

    /// Euclidean inner product over both channels.
    pub fn dot(&self, other: &GradientField) -> f64 {
        let mut acc = 0.0;
        Zip::from(&self.v1).and(&other.v1).for_each(|a, b| acc += a * b);
        Zip::from(&self.v2).and(&other.v2).for_each(|a, b| acc += a * b);
        acc
    }

    /// Squared Euclidean norm over both channels.
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm over both channels.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `‖v‖_{1,2}`: sum over pixels of the per-pixel 2-vector magnitude.
    pub fn l12_norm(&self) -> f64 {
        let mut acc = 0.0;
        Zip::from(&self.v1)
            .and(&self.v2)
            .for_each(|a, b| acc += a.hypot(*b));
        acc
    }

    /// `‖v‖_{∞,2}`: maximum over pixels of the per-pixel 2-vector magnitude.
    pub fn linf2_norm(&self) -> f64 {
        let mut m = 0.0f64;
        Zip::from(&self.v1)
            .and(&self.v2)
            .for_each(|a, b| m = m.max(a.hypot(*b)));
        m
    }

    /// True when every entry of both channels is finite.
    pub fn is_finite(&self) -> bool {
        self.v1.iter().all(|x| x.is_finite()) && self.v2.iter().all(|x| x.is_finite())
    }

    /// In-place `self += t · other`.
    pub fn axpy(&mut self, t: f64, other: &GradientField) {
        Zip::from(&mut self.v1)
            .and(&other.v1)
            .for_each(|a, b| *a += t * b);
        Zip::from(&mut self.v2)
            .and(&other.v2)
            .for_each(|a, b| *a += t * b);
    }

    /// Allocating linear combination `ta · a + tb · b`.
    pub fn combine(a: &GradientField, ta: f64, b: &GradientField, tb: f64) -> GradientField {
        let mut out = GradientField::zeros(a.n());
        Zip::from(&mut out.v1)
            .and(&a.v1)
            .and(&b.v1)
            .for_each(|o, x, y| *o = ta * x + tb * y);
        Zip::from(&mut out.v2)
            .and(&a.v2)
            .and(&b.v2)
            .for_each(|o, x, y| *o = ta * x + tb * y);
        out
    }

    /// Allocating difference `self − other`.
    pub fn sub(&self, other: &GradientField) -> GradientField {
        GradientField::combine(self, 1.0, other, -1.0)
    }
}
