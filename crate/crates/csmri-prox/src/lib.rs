//! Closed-form proximal maps used by the primal-dual and ADMM solvers.
//!
//! Conventions: `prox_{α f}(x) = argmin_y α f(y) + ½‖y − x‖²`.  Every map
//! here has a closed form; the tests cross-check them against independent
//! brute-force minimisation of the defining objective.

use csmri_core::{ComplexImage, GradientField};

/// Grouped (isotropic) soft-thresholding: the proximal map of
/// `α ‖·‖_{1,2}` on a two-channel field, where the mixed norm sums the
/// Euclidean magnitudes of the per-pixel 2-vectors.
///
/// Per pixel: `w = v · (1 − α / max(‖v‖₂, α))`, i.e. magnitudes shrink by
/// `α` and vectors shorter than `α` collapse to zero.  `α = 0` is the
/// identity (the guard also avoids `0/0` at zero vectors).
pub fn prox_group_soft(v: &GradientField, alpha: f64) -> GradientField {
    assert!(alpha >= 0.0, "shrinkage amount must be non-negative");
    if alpha == 0.0 {
        return v.clone();
    }
    let n = v.n();
    let mut out = GradientField::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let a = v.v1[[i, j]];
            let b = v.v2[[i, j]];
            let mag = a.hypot(b);
            let scale = 1.0 - alpha / mag.max(alpha);
            out.v1[[i, j]] = a * scale;
            out.v2[[i, j]] = b * scale;
        }
    }
    out
}

/// Historical unscaled variant of [`prox_group_soft`]: shrinks by a *unit*
/// amount instead of `α` (`w = v − v / max(‖v‖₂, α)`).  Not a proximal map
/// of `α ‖·‖_{1,2}`; kept behind a configuration switch so outputs produced
/// with the unscaled rule can be reproduced and compared.
pub fn prox_group_soft_unscaled(v: &GradientField, alpha: f64) -> GradientField {
    assert!(alpha >= 0.0, "shrinkage amount must be non-negative");
    if alpha == 0.0 {
        return v.clone();
    }
    let n = v.n();
    let mut out = GradientField::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let a = v.v1[[i, j]];
            let b = v.v2[[i, j]];
            let mag = a.hypot(b);
            let scale = 1.0 - 1.0 / mag.max(alpha);
            out.v1[[i, j]] = a * scale;
            out.v2[[i, j]] = b * scale;
        }
    }
    out
}

/// Which grouped shrinkage rule a solver applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupShrinkage {
    /// The exact proximal map of `α ‖·‖_{1,2}` (default).
    #[default]
    Exact,
    /// The historical unscaled rule (unit shrinkage with an `α` guard).
    Unscaled,
}

impl GroupShrinkage {
    pub fn apply(self, v: &GradientField, alpha: f64) -> GradientField {
        match self {
            GroupShrinkage::Exact => prox_group_soft(v, alpha),
            GroupShrinkage::Unscaled => prox_group_soft_unscaled(v, alpha),
        }
    }
}

/// Proximal map of `α · ½‖· − b‖²` on complex arrays:
/// `prox(x) = (x + α b) / (1 + α)`.
pub fn prox_quadratic_shift(x: &ComplexImage, b: &ComplexImage, alpha: f64) -> ComplexImage {
    assert!(alpha >= 0.0);
    assert_eq!(x.dim(), b.dim());
    let denom = 1.0 + alpha;
    ComplexImage::from_shape_fn(x.dim(), |idx| (x[idx] + b[idx] * alpha) / denom)
}

/// Proximal map of `σ · (½‖·‖² + Re⟨·, b⟩)` on complex arrays — the convex
/// conjugate of `½‖· − b‖²` — used for the dual (measurement-space) step of
/// primal-dual iterations: `prox(x) = (x − σ b) / (1 + σ)`.
pub fn prox_conjugate_quadratic(x: &ComplexImage, b: &ComplexImage, sigma: f64) -> ComplexImage {
    assert!(sigma >= 0.0);
    assert_eq!(x.dim(), b.dim());
    let denom = 1.0 + sigma;
    ComplexImage::from_shape_fn(x.dim(), |idx| (x[idx] - b[idx] * sigma) / denom)
}

/// The keep-threshold of [`hard_threshold`]: coefficients with
/// `|x| >= sqrt(2 τ)` survive.
pub fn hard_threshold_level(tau: f64) -> f64 {
    (2.0 * tau).sqrt()
}

/// In-place hard thresholding: the (set-valued) proximal map of
/// `τ ‖·‖₀`, choosing *keep* at the tie `½x² = τ`.  Returns the number of
/// nonzero coefficients remaining.  `τ = 0` keeps everything.
pub fn hard_threshold(xs: &mut [f64], tau: f64) -> usize {
    assert!(tau >= 0.0, "threshold weight must be non-negative");
    let level = hard_threshold_level(tau);
    let mut survivors = 0;
    for x in xs.iter_mut() {
        if x.abs() >= level {
            if *x != 0.0 {
                survivors += 1;
            }
        } else {
            *x = 0.0;
        }
    }
    survivors
}
