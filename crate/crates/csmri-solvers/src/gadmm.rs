//! Generalized ADMM baseline with fixed steps.
//!
//! One iteration performs, with `g^k = Du^k − Σ_s L̃*_s v_s^k + µξ^k`:
//!
//! 1. image update — frame shrinkage with threshold `τµη` applied to
//!    `u^k − τ D*(g^k) − τµ F_M*(F_M u^k − b)`;
//! 2. split-variable updates — grouped shrinkage with threshold `γµλ` on
//!    `v_s^k + γ·L̃_s(Du^{k+1} − Σ_s L̃*_s v_s^k + µξ^k)` (old split sum,
//!    new image);
//! 3. multiplier update — `ξ^{k+1} = ξ^k + (1/µ)(Du^{k+1} − Σ_s L̃*_s
//!    v_s^{k+1})`.
//!
//! Steps are fixed: `τ = 1/(8+µ)`, `γ = 1/4`.  Both updates are proximal
//! gradient steps on the augmented Lagrangian with penalty `1/(2µ)`: the
//! image step uses stepsize `τµ`, the split step stepsize `γµ`, which is
//! why `γ` scales both the argument increment and the shrinkage threshold —
//! the split iteration matrix `I − γ·A*A` (with `A` the stacked half-pixel
//! pull-back, `‖A‖² ≤ 4`) stays in `[0, 1]` exactly when `γ ≤ 1/4`.
//! Dropping `γ` from the argument makes that matrix reach spectral radius
//! 3 and the split variables diverge, so the damped form is used.

use crate::config::GADMMConfig;
use crate::log::IterRecord;
use crate::{instrument, total_split_l12, ReconResult};
use csmri_bm3d::Codebook;
use csmri_core::{ComplexImage, Error, GradientField, Mask, RealImage, Result};
use csmri_operators::{align, align_adjoint_sum, gradient, gradient_adjoint, Lattice, SamplingOp};
use std::time::Instant;

/// Reconstruct with the ADMM baseline.
pub fn gadmm(
    b: &ComplexImage,
    mask: &Mask,
    cfg: &GADMMConfig,
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
    cfg.frame.validate(n)?;

    let tau = cfg.tau();
    let gamma = cfg.gamma();
    let mu = cfg.mu;
    let start = Instant::now();

    let mut u = op.zero_fill(b);
    let mut v: [GradientField; 4] = std::array::from_fn(|_| GradientField::zeros(n));
    let mut xi = GradientField::zeros(n);

    let frozen: Option<Codebook> = if cfg.frozen_codebook {
        Some(Codebook::build(&u, &cfg.frame)?)
    } else {
        None
    };

    let mut log: Vec<IterRecord> = Vec::with_capacity(cfg.max_iters);

    for k in 1..=cfg.max_iters {
        // Shared residual field with the *old* image: g = Du − Σ L̃*_s v_s + µξ.
        let lsum = align_adjoint_sum(&v);
        let mut g = gradient(&u);
        g.axpy(-1.0, &lsum);
        g.axpy(mu, &xi);

        // ---- image update --------------------------------------------------
        let fwd_resid = &op.forward(&u) - b;
        let mut z = u.clone();
        z.scaled_add(-tau, &gradient_adjoint(&g));
        z.scaled_add(-tau * mu, &op.adjoint(&fwd_resid));

        let (u_new, l0) = {
            let built;
            let codebook = match &frozen {
                Some(cb) => cb,
                None => {
                    built = Codebook::build(&z, &cfg.frame)?;
                    &built
                }
            };
            codebook.shrink(&z, tau * mu * cfg.eta)
        };
        if !u_new.iter().all(|x| x.is_finite()) {
            return Err(Error::SolverAbort {
                iter: k,
                reason: "non-finite image iterate".into(),
            });
        }
        u = u_new;

        // ---- split-variable updates ----------------------------------------
        // Same residual field but with the *new* image (old split sum, old
        // multiplier).
        let mut g2 = gradient(&u);
        g2.axpy(-1.0, &lsum);
        g2.axpy(mu, &xi);
        let v_new: [GradientField; 4] = std::array::from_fn(|idx| {
            let lat = Lattice::ALL[idx];
            let arg = GradientField::combine(&v[idx], 1.0, &align(&g2, lat), gamma);
            cfg.shrinkage.apply(&arg, gamma * mu * cfg.lambda)
        });
        if !v_new.iter().all(|f| f.is_finite()) {
            return Err(Error::SolverAbort {
                iter: k,
                reason: "non-finite split iterate".into(),
            });
        }
        v = v_new;

        // ---- multiplier update ----------------------------------------------
        let mut c = gradient(&u);
        c.axpy(-1.0, &align_adjoint_sum(&v));
        let constraint = c.norm();
        xi.axpy(1.0 / mu, &c);
        if !xi.is_finite() {
            return Err(Error::SolverAbort {
                iter: k,
                reason: "non-finite multiplier iterate".into(),
            });
        }

        let mut rec: IterRecord = instrument(
            k,
            &op,
            &u,
            b,
            l0,
            total_split_l12(&v),
            constraint,
            reference,
            start,
        )?;
        rec.tau = tau;
        rec.theta = 0.0;
        rec.tau_initial = tau;
        log.push(rec);
    }

    Ok(ReconResult {
        u,
        log,
        converged: false,
        total_backtracks: 0,
    })
}
