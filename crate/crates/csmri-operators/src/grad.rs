//! Forward-difference gradient with Neumann (replicate) boundary and its
//! exact adjoint.
//!
//! For an `n x n` image `u` (0-based indices):
//!
//! ```text
//! (Du)_1[i][j] = u[i+1][j] - u[i][j]   for i < n-1,   0 for i = n-1
//! (Du)_2[i][j] = u[i][j+1] - u[i][j]   for j < n-1,   0 for j = n-1
//! ```
//!
//! Channel 1 holds differences along rows (vertical direction), channel 2
//! along columns (horizontal direction).  The last row of channel 1 and the
//! last column of channel 2 carry no information and are written as zero,
//! matching the structural-zero convention of [`GradientField`].
//!
//! [`gradient_adjoint`] is the exact matrix transpose of [`gradient`]: the
//! inner-product identity `<Du, v> = <u, D^T v>` holds to machine precision
//! for all inputs, and the dense materialisations are exact transposes of
//! each other (entries are only `0` and `±1`).  `D^T = -div` for the
//! divergence with the matching boundary treatment.
//!
//! The operator norm satisfies `||D||_2 <= sqrt(8)` (standard Gershgorin /
//! Fourier-symbol bound for forward differences in two dimensions).

use csmri_core::{GradientField, RealImage};

/// Forward-difference gradient `D` with Neumann boundary.
pub fn gradient(u: &RealImage) -> GradientField {
    let n = u.nrows();
    debug_assert_eq!(n, u.ncols(), "gradient expects a square image");
    let mut g = GradientField::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                g.v1[[i, j]] = u[[i + 1, j]] - u[[i, j]];
            }
            if j + 1 < n {
                g.v2[[i, j]] = u[[i, j + 1]] - u[[i, j]];
            }
        }
    }
    g
}

/// Exact transpose `D^T` of [`gradient`] (negative divergence).
///
/// The structurally zero positions of the input (last row of channel 1,
/// last column of channel 2) are never read, so stale values there cannot
/// leak into the output.
pub fn gradient_adjoint(v: &GradientField) -> RealImage {
    let n = v.n();
    let mut out = RealImage::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            let mut acc = 0.0;
            // Channel 1: (Dv)_1[i][j] touches u[i][j] (coeff -1) and
            // u[i+1][j] (coeff +1), for i <= n-2 only.
            if a >= 1 {
                acc += v.v1[[a - 1, b]];
            }
            if a + 1 < n {
                acc -= v.v1[[a, b]];
            }
            // Channel 2: same pattern along columns.
            if b >= 1 {
                acc += v.v2[[a, b - 1]];
            }
            if b + 1 < n {
                acc -= v.v2[[a, b]];
            }
            out[[a, b]] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ramp(n: usize) -> RealImage {
        RealImage::from_shape_fn((n, n), |(i, j)| 3.0 * i as f64 - 2.0 * j as f64)
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let u = RealImage::from_elem((5, 5), 4.25);
        let g = gradient(&u);
        assert_eq!(g.norm(), 0.0);
    }

    #[test]
    fn gradient_of_ramp_is_constant_inside() {
        let n = 6;
        let g = gradient(&ramp(n));
        for i in 0..n {
            for j in 0..n {
                let want1 = if i + 1 < n { 3.0 } else { 0.0 };
                let want2 = if j + 1 < n { -2.0 } else { 0.0 };
                assert_abs_diff_eq!(g.v1[[i, j]], want1);
                assert_abs_diff_eq!(g.v2[[i, j]], want2);
            }
        }
    }

    #[test]
    fn structural_zeros_of_input_are_ignored() {
        let n = 5;
        let mut v = GradientField::zeros(n);
        // Only structurally-zero positions carry (bogus) content.
        for k in 0..n {
            v.v1[[n - 1, k]] = 7.0;
            v.v2[[k, n - 1]] = -3.0;
        }
        let out = gradient_adjoint(&v);
        assert_eq!(out.iter().map(|x| x.abs()).fold(0.0, f64::max), 0.0);
    }
}
