//! Half-pixel lattice alignment operators.
//!
//! A forward-difference gradient is *staggered*: its vertical component
//! lives on vertical edge midpoints, its horizontal component on horizontal
//! edge midpoints.  Rotation-invariant coupling of the two components
//! requires both of them at a *common* location.  The four operators here
//! resample a two-channel field onto the four natural common sublattices of
//! the pixel grid by averaging the nearest one, two, or four samples:
//!
//! * [`Lattice::Vertical`] — vertical edge midpoints: channel 1 is already
//!   there (copied); channel 2 is averaged over its four surrounding sites.
//! * [`Lattice::Horizontal`] — horizontal edge midpoints: channel 2 copied;
//!   channel 1 averaged over four sites.
//! * [`Lattice::Center`] — pixel centers: both channels averaged over the
//!   two adjacent sites.
//! * [`Lattice::Corner`] — cell corners: both channels averaged over the
//!   two adjacent sites (mirrored offsets relative to `Center`).
//!
//! # Stencils
//!
//! With 0-based indices, zero extension outside the grid, and writing
//! `p1/p2` for the input channels read through the structural-zero mask
//! (channel 1: last row zero; channel 2: last column zero — see
//! [`GradientField`]):
//!
//! ```text
//! Vertical:    out1[i][j] = p1[i][j]
//!              out2[i][j] = (p2[i][j] + p2[i][j-1] + p2[i+1][j] + p2[i+1][j-1]) / 4
//! Horizontal:  out1[i][j] = (p1[i][j] + p1[i-1][j] + p1[i][j+1] + p1[i-1][j+1]) / 4
//!              out2[i][j] = p2[i][j]
//! Center:      out1[i][j] = (p1[i][j] + p1[i-1][j]) / 2
//!              out2[i][j] = (p2[i][j] + p2[i][j-1]) / 2
//! Corner:      out1[i][j] = (p1[i][j] + p1[i][j+1]) / 2
//!              out2[i][j] = (p2[i][j] + p2[i+1][j]) / 2
//! ```
//!
//! # Boundary structure
//!
//! Each output lattice has positions that fall outside the physical field
//! of view; those are forced to zero after the stencil is applied:
//!
//! * `Vertical`: last **row** of both channels,
//! * `Horizontal`: last **column** of both channels,
//! * `Center`: nothing (pixel centers all lie inside),
//! * `Corner`: last row **and** last column of both channels.
//!
//! [`align_adjoint`] is the exact matrix transpose of [`align`]: it reads
//! its input through the operator-specific boundary mask above, applies the
//! transposed stencil, and writes its output through the structural-zero
//! mask of [`GradientField`].  This factored structure
//! (`align = B_out ∘ stencil ∘ B_in`, `align_adjoint = B_in ∘ stencilᵀ ∘ B_out`)
//! is what makes the inner-product identity, the dense-transpose identity,
//! and the quarter-turn commutation identities (see `rotate`) all hold
//! exactly rather than up to boundary artefacts.
//!
//! Every averaging weight is `1`, `1/2`, or `1/4`, all exactly
//! representable in binary floating point, so the dense materialisations of
//! forward and adjoint are *bitwise* transposes of each other.
//!
//! Each operator has `||.||_2 <= 1` (the stencils are convex averages), and
//! the stacked adjoint sum `(w_s)_s -> Σ_s align_adjointᵀ…` is bounded by 4.

use csmri_core::{GradientField, RealImage};

/// The four common sublattices a staggered field can be aligned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    /// Vertical edge midpoints (channel 1 sites).
    Vertical,
    /// Horizontal edge midpoints (channel 2 sites).
    Horizontal,
    /// Pixel centers.
    Center,
    /// Cell corners.
    Corner,
}

impl Lattice {
    /// All four lattices in canonical order.
    pub const ALL: [Lattice; 4] = [
        Lattice::Vertical,
        Lattice::Horizontal,
        Lattice::Center,
        Lattice::Corner,
    ];

    /// Short lowercase name for logs and config files.
    pub fn name(self) -> &'static str {
        match self {
            Lattice::Vertical => "vertical",
            Lattice::Horizontal => "horizontal",
            Lattice::Center => "center",
            Lattice::Corner => "corner",
        }
    }

    /// Does this lattice's output zero the last row (both channels)?
    #[inline]
    pub(crate) fn zeros_last_row(self) -> bool {
        matches!(self, Lattice::Vertical | Lattice::Corner)
    }

    /// Does this lattice's output zero the last column (both channels)?
    #[inline]
    pub(crate) fn zeros_last_col(self) -> bool {
        matches!(self, Lattice::Horizontal | Lattice::Corner)
    }
}

/// Zero the positions of `img` excluded by the lattice boundary rule.
fn apply_lattice_mask(img: &mut RealImage, lat: Lattice) {
    let n = img.nrows();
    if lat.zeros_last_row() {
        img.row_mut(n - 1).fill(0.0);
    }
    if lat.zeros_last_col() {
        img.column_mut(n - 1).fill(0.0);
    }
}

/// Align a staggered two-channel field onto the given sublattice.
pub fn align(v: &GradientField, lat: Lattice) -> GradientField {
    let n = v.n() as isize;
    // Reads honour the structural zeros of the staggered layout: channel 1
    // has no sample in its last row, channel 2 none in its last column.
    let p1 = |i: isize, j: isize| -> f64 {
        if i >= 0 && j >= 0 && i < n - 1 && j < n {
            v.v1[[i as usize, j as usize]]
        } else {
            0.0
        }
    };
    let p2 = |i: isize, j: isize| -> f64 {
        if i >= 0 && j >= 0 && i < n && j < n - 1 {
            v.v2[[i as usize, j as usize]]
        } else {
            0.0
        }
    };

    let nu = n as usize;
    let mut out = GradientField::zeros(nu);
    for iu in 0..nu {
        for ju in 0..nu {
            let (i, j) = (iu as isize, ju as isize);
            let (o1, o2) = match lat {
                Lattice::Vertical => (
                    p1(i, j),
                    0.25 * (p2(i, j) + p2(i, j - 1) + p2(i + 1, j) + p2(i + 1, j - 1)),
                ),
                Lattice::Horizontal => (
                    0.25 * (p1(i, j) + p1(i - 1, j) + p1(i, j + 1) + p1(i - 1, j + 1)),
                    p2(i, j),
                ),
                Lattice::Center => (
                    0.5 * (p1(i, j) + p1(i - 1, j)),
                    0.5 * (p2(i, j) + p2(i, j - 1)),
                ),
                Lattice::Corner => (
                    0.5 * (p1(i, j) + p1(i, j + 1)),
                    0.5 * (p2(i, j) + p2(i + 1, j)),
                ),
            };
            out.v1[[iu, ju]] = o1;
            out.v2[[iu, ju]] = o2;
        }
    }
    apply_lattice_mask(&mut out.v1, lat);
    apply_lattice_mask(&mut out.v2, lat);
    out
}

/// Exact transpose of [`align`] for the same lattice.
pub fn align_adjoint(w: &GradientField, lat: Lattice) -> GradientField {
    let n = w.n() as isize;
    let zr = lat.zeros_last_row();
    let zc = lat.zeros_last_col();
    // Reads honour the lattice boundary mask of the forward output.
    let q = |ch: &RealImage, i: isize, j: isize| -> f64 {
        if i >= 0
            && j >= 0
            && i < n
            && j < n
            && !(zr && i == n - 1)
            && !(zc && j == n - 1)
        {
            ch[[i as usize, j as usize]]
        } else {
            0.0
        }
    };

    let nu = n as usize;
    let mut out = GradientField::zeros(nu);
    for iu in 0..nu {
        for ju in 0..nu {
            let (i, j) = (iu as isize, ju as isize);
            let (o1, o2) = match lat {
                Lattice::Vertical => (
                    q(&w.v1, i, j),
                    0.25
                        * (q(&w.v2, i, j)
                            + q(&w.v2, i, j + 1)
                            + q(&w.v2, i - 1, j)
                            + q(&w.v2, i - 1, j + 1)),
                ),
                Lattice::Horizontal => (
                    0.25
                        * (q(&w.v1, i, j)
                            + q(&w.v1, i + 1, j)
                            + q(&w.v1, i, j - 1)
                            + q(&w.v1, i + 1, j - 1)),
                    q(&w.v2, i, j),
                ),
                Lattice::Center => (
                    0.5 * (q(&w.v1, i, j) + q(&w.v1, i + 1, j)),
                    0.5 * (q(&w.v2, i, j) + q(&w.v2, i, j + 1)),
                ),
                Lattice::Corner => (
                    0.5 * (q(&w.v1, i, j) + q(&w.v1, i, j - 1)),
                    0.5 * (q(&w.v2, i, j) + q(&w.v2, i - 1, j)),
                ),
            };
            out.v1[[iu, ju]] = o1;
            out.v2[[iu, ju]] = o2;
        }
    }
    // Outputs land back on the staggered layout with its structural zeros.
    out.v1.row_mut(nu - 1).fill(0.0);
    out.v2.column_mut(nu - 1).fill(0.0);
    out
}

/// `Σ_s align_adjoint(w_s, s)` over the canonical lattice order.
pub fn align_adjoint_sum(ws: &[GradientField; 4]) -> GradientField {
    let n = ws[0].n();
    let mut acc = GradientField::zeros(n);
    for (w, lat) in ws.iter().zip(Lattice::ALL) {
        let term = align_adjoint(w, lat);
        acc.axpy(1.0, &term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// A field of ones restricted to the staggered structural support.
    fn ones_field(n: usize) -> GradientField {
        let mut v = GradientField::zeros(n);
        v.v1.fill(1.0);
        v.v2.fill(1.0);
        v.v1.row_mut(n - 1).fill(0.0);
        v.v2.column_mut(n - 1).fill(0.0);
        v
    }

    #[test]
    fn vertical_keeps_channel_one() {
        let n = 6;
        let mut v = GradientField::zeros(n);
        for i in 0..n - 1 {
            for j in 0..n {
                v.v1[[i, j]] = (i * n + j) as f64;
            }
        }
        let w = align(&v, Lattice::Vertical);
        for i in 0..n - 1 {
            for j in 0..n {
                assert_abs_diff_eq!(w.v1[[i, j]], v.v1[[i, j]]);
            }
        }
        // Boundary rule: last row of the output is zero.
        for j in 0..n {
            assert_eq!(w.v1[[n - 1, j]], 0.0);
        }
    }

    #[test]
    fn averages_preserve_constants_in_the_interior() {
        let n = 8;
        let v = ones_field(n);
        for lat in Lattice::ALL {
            let w = align(&v, lat);
            // Away from all boundaries every stencil is a convex average of
            // ones, so the value is exactly one.
            for i in 2..n - 2 {
                for j in 2..n - 2 {
                    assert_abs_diff_eq!(w.v1[[i, j]], 1.0, epsilon = 0.0);
                    assert_abs_diff_eq!(w.v2[[i, j]], 1.0, epsilon = 0.0);
                }
            }
        }
    }

    #[test]
    fn boundary_masks_are_enforced() {
        let n = 5;
        let v = ones_field(n);
        for lat in Lattice::ALL {
            let w = align(&v, lat);
            if lat.zeros_last_row() {
                for j in 0..n {
                    assert_eq!(w.v1[[n - 1, j]], 0.0);
                    assert_eq!(w.v2[[n - 1, j]], 0.0);
                }
            }
            if lat.zeros_last_col() {
                for i in 0..n {
                    assert_eq!(w.v1[[i, n - 1]], 0.0);
                    assert_eq!(w.v2[[i, n - 1]], 0.0);
                }
            }
            let a = align_adjoint(&w, lat);
            for j in 0..n {
                assert_eq!(a.v1[[n - 1, j]], 0.0);
            }
            for i in 0..n {
                assert_eq!(a.v2[[i, n - 1]], 0.0);
            }
        }
    }

    #[test]
    fn masked_input_positions_are_never_read() {
        let n = 5;
        for lat in Lattice::ALL {
            let mut v = GradientField::zeros(n);
            for k in 0..n {
                v.v1[[n - 1, k]] = 9.0; // structurally zero positions
                v.v2[[k, n - 1]] = -9.0;
            }
            let w = align(&v, lat);
            assert_eq!(w.norm(), 0.0, "{lat:?} read a masked input position");
        }
    }
}
