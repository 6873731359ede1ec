//! Solver configurations with validation.

use csmri_bm3d::FrameParams;
use csmri_core::{Error, Result};
use csmri_prox::GroupShrinkage;

/// Which terms of the composite objective the primal-dual solver keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MPMode {
    /// Frame sparsity and the structure-regularizer machinery together.
    #[default]
    Full,
    /// Frame-sparsity term only: the split variables, the field multiplier,
    /// and the constraint row of the stacked operator are dropped.
    Bm3dOnly,
    /// Structure regularizer only: the frame shrinkage in the image update
    /// is replaced by the identity.
    RitvOnly,
}

impl MPMode {
    /// The image update applies frame shrinkage in this mode.
    pub fn uses_frame(self) -> bool {
        !matches!(self, MPMode::RitvOnly)
    }

    /// The split variables / field multiplier machinery runs in this mode.
    pub fn uses_splits(self) -> bool {
        !matches!(self, MPMode::Bm3dOnly)
    }
}

/// Configuration of the primal-dual solver with linesearch.
#[derive(Debug, Clone, PartialEq)]
pub struct MPConfig {
    /// Weight of the frame-sparsity (ℓ0) term.
    pub eta: f64,
    /// Weight of the structure regularizer.
    pub lambda: f64,
    /// Backtracking factor in (0, 1): each rejected trial multiplies the
    /// step by this.
    pub mu: f64,
    /// Acceptance slack in (0, 1) for the linesearch inequality.
    pub delta: f64,
    /// Ratio of the dual step to the primal step (σ = β·τ).
    pub beta: f64,
    /// Initial primal step.
    pub tau0: f64,
    /// Outer iteration budget.
    pub max_iters: usize,
    /// Abort if a single linesearch rejects this many trials.
    pub max_linesearch_backtracks: usize,
    /// Where in the allowed growth interval the trial step starts:
    /// 0 re-uses the previous step, 1 takes the largest admissible growth
    /// `τ·√(1+θ)`; values in between interpolate.
    pub step_ratio: f64,
    /// Optional early exit when ‖u_new − u‖/‖u‖ falls below this.
    pub rel_change_tol: Option<f64>,
    /// Block-matching frame parameters for the image update.
    pub frame: FrameParams,
    /// Build the matching codebook once from the zero-filled start instead
    /// of re-matching on every image update (debugging aid).
    pub frozen_codebook: bool,
    /// Which grouped shrinkage rule the split-variable update applies.
    pub shrinkage: GroupShrinkage,
}

impl Default for MPConfig {
    fn default() -> Self {
        MPConfig {
            eta: 0.2,
            lambda: 1e-3 / 7.0,
            mu: 0.7,
            delta: 0.99,
            beta: 0.016,
            tau0: 8.0 / 7.0,
            max_iters: 100,
            max_linesearch_backtracks: 50,
            step_ratio: 1.0,
            rel_change_tol: Some(1e-8),
            frame: FrameParams::default(),
            frozen_codebook: false,
            shrinkage: GroupShrinkage::Exact,
        }
    }
}

impl MPConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) {
            return Err(Error::invalid_parameter("eta", "must be non-negative"));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::invalid_parameter("lambda", "must be non-negative"));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::invalid_parameter("mu", "must lie in (0, 1)"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid_parameter("delta", "must lie in (0, 1)"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid_parameter("beta", "must be positive"));
        }
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return Err(Error::invalid_parameter("tau0", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid_parameter("max_iters", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.step_ratio) {
            return Err(Error::invalid_parameter(
                "step_ratio",
                "must lie in [0, 1]",
            ));
        }
        if let Some(tol) = self.rel_change_tol {
            if !(tol > 0.0) {
                return Err(Error::invalid_parameter(
                    "rel_change_tol",
                    "must be positive when set",
                ));
            }
        }
        Ok(())
    }
}

/// Configuration of the ADMM baseline.
///
/// The primal step `τ = 1/(8 + µ)` and the split step `γ = 1/4` are derived
/// from the penalty weight, keeping `τ < 1/(‖D‖ + µ)` (the gradient norm is
/// at most √8) and `γ` at the admissible boundary `1/Σ_s‖L_s‖ = 1/4`.
#[derive(Debug, Clone, PartialEq)]
pub struct GADMMConfig {
    /// Augmented-Lagrangian penalty weight (typically 1e2 … 1e6).
    pub mu: f64,
    /// Weight of the frame-sparsity term.
    pub eta: f64,
    /// Weight of the structure regularizer.
    pub lambda: f64,
    /// Outer iteration budget.
    pub max_iters: usize,
    /// Block-matching frame parameters for the image update.
    pub frame: FrameParams,
    /// Build the matching codebook once from the zero-filled start.
    pub frozen_codebook: bool,
    /// Which grouped shrinkage rule the split-variable update applies.
    pub shrinkage: GroupShrinkage,
}

impl Default for GADMMConfig {
    fn default() -> Self {
        GADMMConfig {
            mu: 1e4,
            eta: 0.2,
            lambda: 1e-3 / 7.0,
            max_iters: 300,
            frame: FrameParams::default(),
            frozen_codebook: false,
            shrinkage: GroupShrinkage::Exact,
        }
    }
}

impl GADMMConfig {
    /// Primal step `1/(8 + µ)`.
    pub fn tau(&self) -> f64 {
        1.0 / (8.0 + self.mu)
    }

    /// Split-variable step `1/4`.
    pub fn gamma(&self) -> f64 {
        0.25
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid_parameter("mu", "must be positive"));
        }
        if !(self.eta >= 0.0) {
            return Err(Error::invalid_parameter("eta", "must be non-negative"));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::invalid_parameter("lambda", "must be non-negative"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid_parameter("max_iters", "must be positive"));
        }
        Ok(())
    }
}
