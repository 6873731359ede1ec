//! Primal-dual reconstruction with linesearch.
//!
//! One outer iteration performs, in order:
//!
//! 1. image update — a gradient step on the dual variables pulled back to
//!    image space, followed by frame shrinkage with threshold `η·τ`
//!    (identity when the frame term is off);
//! 2. split-variable updates — grouped shrinkage with threshold `τ·λ` on a
//!    dual-descent argument;
//! 3. linesearch — the trial step grows from `τ` toward `τ·√(1+θ)`, the
//!    dual variables are updated from extrapolated primal points, and the
//!    trial is accepted iff `√β·τ·‖K*Δy‖ ≤ δ·‖Δy‖`, where `Δy` collects
//!    the dual increments and `K` is the stacked measurement/constraint
//!    operator; each rejection multiplies the trial step by `µ`.
//!
//! The dual step is tied to the primal step by `σ = β·τ` throughout, so
//! the single knob `β` sets the dual/primal ratio and the reconstruction
//! itself does not depend on it (only the path taken does).

use crate::config::{MPConfig, MPMode};
use crate::log::IterRecord;
use crate::{image_l2, instrument, total_split_l12, ReconResult, SolverState};
use csmri_bm3d::Codebook;
use csmri_core::{ComplexImage, Error, GradientField, Mask, RealImage, Result};
use csmri_operators::{
    align, align_adjoint_sum, c_norm_sq, gradient, gradient_adjoint, Lattice, SamplingOp,
};
use csmri_prox::prox_conjugate_quadratic;
use std::time::Instant;

/// Reconstruct with every term active. Equivalent to [`mp_variant`] with
/// [`MPMode::Full`].
pub fn malitsky_pock(
    b: &ComplexImage,
    mask: &Mask,
    cfg: &MPConfig,
    reference: Option<&RealImage>,
) -> Result<ReconResult> {
    mp_variant(b, mask, cfg, MPMode::Full, reference)
}

/// Reconstruct with the chosen subset of objective terms.
pub fn mp_variant(
    b: &ComplexImage,
    mask: &Mask,
    cfg: &MPConfig,
    mode: MPMode,
    reference: Option<&RealImage>,
) -> Result<ReconResult> {
    cfg.validate()?;
    let op = SamplingOp::new(mask.clone());
    let n = op.n();
    if b.nrows() != n || b.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "measured data vs mask",
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", b.nrows(), b.ncols()),
        });
    }
    if mode.uses_frame() {
        cfg.frame.validate(n)?;
    }

    let start = Instant::now();
    let mut st = SolverState::init(op.zero_fill(b), cfg.tau0);

    let frozen: Option<Codebook> = if mode.uses_frame() && cfg.frozen_codebook {
        Some(Codebook::build(&st.u, &cfg.frame)?)
    } else {
        None
    };

    let mut log: Vec<IterRecord> = Vec::with_capacity(cfg.max_iters);
    let mut total_backtracks = 0usize;
    let mut converged = false;

    for k in 1..=cfg.max_iters {
        let tau_prev = st.tau;

        // ---- image update ------------------------------------------------
        // z = u − τ (F_M* r − D* h); the multiplier pull-back only exists
        // when the split machinery runs.
        let mut step_dir = op.adjoint(&st.r);
        if mode.uses_splits() {
            step_dir = &step_dir - &gradient_adjoint(&st.h);
        }
        let mut z = st.u.clone();
        z.scaled_add(-tau_prev, &step_dir);

        let (u_new, l0) = if mode.uses_frame() {
            let built;
            let codebook = match &frozen {
                Some(cb) => cb,
                None => {
                    built = Codebook::build(&z, &cfg.frame)?;
                    &built
                }
            };
            codebook.shrink(&z, cfg.eta * tau_prev)
        } else {
            (z, 0)
        };
        if !u_new.iter().all(|x| x.is_finite()) {
            return Err(Error::SolverAbort {
                iter: k,
                reason: "non-finite image iterate".into(),
            });
        }

        // ---- split-variable updates ----------------------------------------
        let v_new: [GradientField; 4] = if mode.uses_splits() {
            std::array::from_fn(|idx| {
                let lat = Lattice::ALL[idx];
                let arg = GradientField::combine(&st.v[idx], 1.0, &align(&st.h, lat), -tau_prev);
                cfg.shrinkage.apply(&arg, tau_prev * cfg.lambda)
            })
        } else {
            std::array::from_fn(|_| GradientField::zeros(n))
        };
        if mode.uses_splits() && !v_new.iter().all(|f| f.is_finite()) {
            return Err(Error::SolverAbort {
                iter: k,
                reason: "non-finite split iterate".into(),
            });
        }

        // ---- linesearch ----------------------------------------------------
        let growth = 1.0 + cfg.step_ratio * ((1.0 + st.theta).sqrt() - 1.0);
        let tau_initial = tau_prev * growth;
        let mut tau_try = tau_initial;
        let mut backtracks = 0usize;
        let (accept_lhs, accept_rhs);

        loop {
            if !tau_try.is_finite() || tau_try <= 0.0 {
                return Err(Error::SolverAbort {
                    iter: k,
                    reason: format!("step degenerated to {tau_try} during linesearch"),
                });
            }
            let theta_try = tau_try / tau_prev;
            let sigma = cfg.beta * tau_try;

            // Extrapolated primal points.
            let mut ubar = u_new.clone();
            ubar *= 1.0 + theta_try;
            ubar.scaled_add(-theta_try, &st.u);

            // Dual update in measurement space.
            let fu = op.forward(&ubar);
            let r_arg = ComplexImage::from_shape_fn((n, n), |idx| fu[idx] * sigma + st.r[idx]);
            let r_new = prox_conjugate_quadratic(&r_arg, b, sigma);
            let dr = &r_new - &st.r;

            // Dual update in constraint space.
            let (h_new, dh) = if mode.uses_splits() {
                let vbar: [GradientField; 4] = std::array::from_fn(|idx| {
                    GradientField::combine(&v_new[idx], 1.0 + theta_try, &st.v[idx], -theta_try)
                });
                let du = gradient(&ubar);
                let lsum = align_adjoint_sum(&vbar);
                let mut hn = st.h.clone();
                hn.axpy(-sigma, &du);
                hn.axpy(sigma, &lsum);
                let dh = hn.sub(&st.h);
                (Some(hn), Some(dh))
            } else {
                (None, None)
            };

            // Acceptance test: √β·τ·‖K*Δy‖ ≤ δ·‖Δy‖.
            let mut kstar_sq;
            let mut dy_sq = c_norm_sq(&dr);
            match &dh {
                Some(dh) => {
                    let img_part = &op.adjoint(&dr) - &gradient_adjoint(dh);
                    kstar_sq = image_l2(&img_part).powi(2);
                    for lat in Lattice::ALL {
                        kstar_sq += align(dh, lat).norm_sq();
                    }
                    dy_sq += dh.norm_sq();
                }
                None => {
                    kstar_sq = image_l2(&op.adjoint(&dr)).powi(2);
                }
            }
            let lhs = cfg.beta.sqrt() * tau_try * kstar_sq.sqrt();
            let rhs = cfg.delta * dy_sq.sqrt();
            if !lhs.is_finite() || !rhs.is_finite() {
                return Err(Error::SolverAbort {
                    iter: k,
                    reason: "non-finite dual iterate in linesearch".into(),
                });
            }

            if lhs <= rhs {
                st.r = r_new;
                if let Some(hn) = h_new {
                    st.h = hn;
                }
                st.tau = tau_try;
                st.theta = theta_try;
                accept_lhs = lhs;
                accept_rhs = rhs;
                break;
            }
            backtracks += 1;
            if backtracks > cfg.max_linesearch_backtracks {
                return Err(Error::SolverAbort {
                    iter: k,
                    reason: format!(
                        "linesearch rejected {backtracks} trials (last step {tau_try:.3e})"
                    ),
                });
            }
            tau_try *= cfg.mu;
        }
        total_backtracks += backtracks;

        // ---- bookkeeping -----------------------------------------------------
        let rel_change =
            image_l2(&(&u_new - &st.u)) / image_l2(&st.u).max(f64::MIN_POSITIVE);
        st.u = u_new;
        st.v = v_new;
        st.iter = k;

        let (l12, constraint) = if mode.uses_splits() {
            let du = gradient(&st.u);
            let lsum = align_adjoint_sum(&st.v);
            (total_split_l12(&st.v), du.sub(&lsum).norm())
        } else {
            (0.0, 0.0)
        };
        let mut rec = instrument(k, &op, &st.u, b, l0, l12, constraint, reference, start)?;
        rec.tau = st.tau;
        rec.theta = st.theta;
        rec.backtracks = backtracks;
        rec.accept_lhs = accept_lhs;
        rec.accept_rhs = accept_rhs;
        rec.tau_initial = tau_initial;
        log.push(rec);

        if let Some(tol) = cfg.rel_change_tol {
            if rel_change < tol {
                converged = true;
                break;
            }
        }
    }

    Ok(ReconResult {
        u: st.u,
        log,
        converged,
        total_backtracks,
    })
}
