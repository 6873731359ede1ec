//! Power-iteration estimates of operator norms.
//!
//! All estimators iterate `x <- A*(A x) / ||A*(A x)||` from a fixed
//! deterministic pseudo-random start, so they are reproducible without
//! threading an RNG through callers.  Power iteration converges to the
//! largest singular value from below (up to the component of the start
//! vector in the top singular space), which is the safe direction for
//! choosing step sizes of the form `c / ||A||` with `c < 1`.
//!
//! Analytic bounds used as test oracles:
//! * forward-difference gradient: `||D|| <= sqrt(8)`;
//! * each lattice alignment operator: `||L_s|| <= 1` (convex averaging);
//! * the stacked map `(w_s)_s -> Σ_s L_sᵀ w_s`: `<= 4` by the triangle
//!   inequality (and its transpose `h -> (L_s h)_s` likewise).

use csmri_core::{GradientField, RealImage};

use crate::grad::{gradient, gradient_adjoint};
use crate::lattice::{align, align_adjoint, align_adjoint_sum, Lattice};

/// Deterministic pseudo-random fill in `[-0.5, 0.5)` (splitmix64 stream).
fn seeded_image(n: usize, seed: u64) -> RealImage {
    let mut state = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    RealImage::from_shape_fn((n, n), |_| next())
}

fn seeded_field(n: usize, seed: u64) -> GradientField {
    GradientField::new(seeded_image(n, seed), seeded_image(n, seed ^ 0xABCD))
}

/// Estimate `||D||_2` on `n x n` images.
pub fn gradient_norm(n: usize, iters: usize) -> f64 {
    let mut x = seeded_image(n, 1);
    let mut sigma = 0.0;
    for _ in 0..iters {
        let y = gradient(&x);
        let z = gradient_adjoint(&y);
        let zn = z.iter().map(|a| a * a).sum::<f64>().sqrt();
        if zn == 0.0 {
            return 0.0;
        }
        sigma = zn / x.iter().map(|a| a * a).sum::<f64>().sqrt();
        x = z.mapv(|a| a / zn);
    }
    sigma.sqrt()
}

/// Estimate `||L_s||_2` for one lattice alignment operator.
pub fn align_norm(lat: Lattice, n: usize, iters: usize) -> f64 {
    let mut x = seeded_field(n, 2);
    let mut sigma = 0.0;
    for _ in 0..iters {
        let y = align(&x, lat);
        let z = align_adjoint(&y, lat);
        let zn = z.norm();
        if zn == 0.0 {
            return 0.0;
        }
        sigma = zn / x.norm();
        x.v1 = z.v1.mapv(|a| a / zn);
        x.v2 = z.v2.mapv(|a| a / zn);
    }
    sigma.sqrt()
}

/// Estimate the norm of the stacked alignment map
/// `h -> (L_s h)_{s in ALL}` (whose adjoint is `(w_s)_s -> Σ_s L_sᵀ w_s`).
pub fn align_stack_norm(n: usize, iters: usize) -> f64 {
    let mut x = seeded_field(n, 3);
    let mut sigma = 0.0;
    for _ in 0..iters {
        let ys: [GradientField; 4] = [
            align(&x, Lattice::Vertical),
            align(&x, Lattice::Horizontal),
            align(&x, Lattice::Center),
            align(&x, Lattice::Corner),
        ];
        let z = align_adjoint_sum(&ys);
        let zn = z.norm();
        if zn == 0.0 {
            return 0.0;
        }
        sigma = zn / x.norm();
        x.v1 = z.v1.mapv(|a| a / zn);
        x.v2 = z.v2.mapv(|a| a / zn);
    }
    sigma.sqrt()
}
