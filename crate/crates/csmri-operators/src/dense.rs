//! Dense matrix materialisation of the linear operators, for small-size
//! oracle tests.
//!
//! Vectorisation conventions:
//! * an `n x n` image flattens row-major to a length `n²` vector;
//! * a two-channel field flattens to length `2n²`, channel 1 first.
//!
//! Every stencil weight is `0`, `±1/4`, `±1/2`, or `±1` — all exactly
//! representable — so a forward matrix and its adjoint's matrix can be
//! compared for *bitwise* transpose equality, not merely up to rounding.

use csmri_core::{GradientField, RealImage};
use ndarray::Array2;

use crate::grad::{gradient, gradient_adjoint};
use crate::lattice::{align, align_adjoint, Lattice};

fn image_from_vec(x: &[f64], n: usize) -> RealImage {
    RealImage::from_shape_vec((n, n), x.to_vec()).expect("length n^2")
}

fn image_to_vec(u: &RealImage) -> Vec<f64> {
    u.iter().copied().collect()
}

fn field_from_vec(x: &[f64], n: usize) -> GradientField {
    let (a, b) = x.split_at(n * n);
    GradientField::new(image_from_vec(a, n), image_from_vec(b, n))
}

fn field_to_vec(v: &GradientField) -> Vec<f64> {
    let mut out = image_to_vec(&v.v1);
    out.extend(image_to_vec(&v.v2));
    out
}

/// Materialise an image -> field operator as a `2n² x n²` matrix.
pub fn dense_image_to_field<F>(n: usize, op: F) -> Array2<f64>
where
    F: Fn(&RealImage) -> GradientField,
{
    let cols = n * n;
    let mut m = Array2::zeros((2 * cols, cols));
    let mut e = vec![0.0; cols];
    for c in 0..cols {
        e[c] = 1.0;
        let col = field_to_vec(&op(&image_from_vec(&e, n)));
        for (r, val) in col.iter().enumerate() {
            m[[r, c]] = *val;
        }
        e[c] = 0.0;
    }
    m
}

/// Materialise a field -> image operator as an `n² x 2n²` matrix.
pub fn dense_field_to_image<F>(n: usize, op: F) -> Array2<f64>
where
    F: Fn(&GradientField) -> RealImage,
{
    let cols = 2 * n * n;
    let mut m = Array2::zeros((n * n, cols));
    let mut e = vec![0.0; cols];
    for c in 0..cols {
        e[c] = 1.0;
        let col = image_to_vec(&op(&field_from_vec(&e, n)));
        for (r, val) in col.iter().enumerate() {
            m[[r, c]] = *val;
        }
        e[c] = 0.0;
    }
    m
}

/// Materialise a field -> field operator as a `2n² x 2n²` matrix.
pub fn dense_field_to_field<F>(n: usize, op: F) -> Array2<f64>
where
    F: Fn(&GradientField) -> GradientField,
{
    let cols = 2 * n * n;
    let mut m = Array2::zeros((cols, cols));
    let mut e = vec![0.0; cols];
    for c in 0..cols {
        e[c] = 1.0;
        let col = field_to_vec(&op(&field_from_vec(&e, n)));
        for (r, val) in col.iter().enumerate() {
            m[[r, c]] = *val;
        }
        e[c] = 0.0;
    }
    m
}

/// Dense forward-difference gradient matrix (`2n² x n²`).
pub fn dense_gradient(n: usize) -> Array2<f64> {
    dense_image_to_field(n, gradient)
}

/// Dense gradient adjoint matrix (`n² x 2n²`).
pub fn dense_gradient_adjoint(n: usize) -> Array2<f64> {
    dense_field_to_image(n, gradient_adjoint)
}

/// Dense lattice alignment matrix (`2n² x 2n²`).
pub fn dense_align(n: usize, lat: Lattice) -> Array2<f64> {
    dense_field_to_field(n, move |v| align(v, lat))
}

/// Dense lattice alignment adjoint matrix (`2n² x 2n²`).
pub fn dense_align_adjoint(n: usize, lat: Lattice) -> Array2<f64> {
    dense_field_to_field(n, move |w| align_adjoint(w, lat))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bitwise transpose equality (weights are exactly representable).
    fn assert_exact_transpose(a: &Array2<f64>, bt: &Array2<f64>, what: &str) {
        assert_eq!(a.dim().0, bt.dim().1, "{what}: shape mismatch");
        assert_eq!(a.dim().1, bt.dim().0, "{what}: shape mismatch");
        for r in 0..a.dim().0 {
            for c in 0..a.dim().1 {
                assert!(
                    a[[r, c]] == bt[[c, r]],
                    "{what}: entry ({r},{c}) {} != {}",
                    a[[r, c]],
                    bt[[c, r]]
                );
            }
        }
    }

    #[test]
    fn gradient_matrices_are_exact_transposes() {
        for n in [2, 3, 5] {
            let d = dense_gradient(n);
            let dt = dense_gradient_adjoint(n);
            assert_exact_transpose(&d, &dt, "gradient");
        }
    }

    #[test]
    fn alignment_matrices_are_exact_transposes() {
        for n in [2, 4] {
            for lat in Lattice::ALL {
                let l = dense_align(n, lat);
                let lt = dense_align_adjoint(n, lat);
                assert_exact_transpose(&l, &lt, lat.name());
            }
        }
    }

    #[test]
    fn alignment_entries_are_quarter_integers() {
        let n = 4;
        for lat in Lattice::ALL {
            let l = dense_align(n, lat);
            for &x in l.iter() {
                let q = 4.0 * x;
                assert_eq!(q, q.round(), "{}: weight {x} not k/4", lat.name());
                assert!(x.abs() <= 1.0);
            }
        }
    }
}
