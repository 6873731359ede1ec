//! Per-iteration instrumentation records, CSV export, and the post-hoc
//! linesearch audit.

use csmri_core::Result;
use std::path::Path;

/// One row of the iterate log.
///
/// The CSV contract columns are `iter, tau, theta, backtracks, data_term,
/// l0_count, l12_term, constraint_residual, snr, ssim, hfen, wall_ms`; the
/// remaining fields are kept in memory for the post-hoc linesearch audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    /// Iteration index, starting at 1 for the first completed update.
    pub iter: usize,
    /// Accepted primal step for this iteration.
    pub tau: f64,
    /// Accepted extrapolation weight `τ_k / τ_{k−1}` (0 for solvers with a
    /// fixed step).
    pub theta: f64,
    /// Number of rejected linesearch trials before acceptance.
    pub backtracks: usize,
    /// ½‖F_M u − b‖².
    pub data_term: f64,
    /// Surviving frame coefficients in the image update (0 when the frame
    /// term is off).
    pub l0_count: usize,
    /// Σ_s ‖v_s‖_{1,2} over the split variables (0 when they are off).
    pub l12_term: f64,
    /// ‖Du − Σ_s L̃*_s v_s‖₂ (0 when the splits are off).
    pub constraint_residual: f64,
    /// Quality vs the reference image; NaN when no reference was given.
    pub snr: f64,
    pub ssim: f64,
    pub hfen: f64,
    /// Milliseconds since the solver started, measured at the end of the
    /// iteration.
    pub wall_ms: f64,
    /// Left side `√β·τ_k·‖K*Δy‖` of the acceptance inequality at the
    /// accepted trial.
    pub accept_lhs: f64,
    /// Right side `δ·‖Δy‖` of the acceptance inequality at the accepted
    /// trial.
    pub accept_rhs: f64,
    /// The trial step before any backtracking this iteration.
    pub tau_initial: f64,
}

/// Write the iterate log as CSV with the documented column set.
pub fn write_csv(path: &Path, log: &[IterRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record([
        "iter",
        "tau",
        "theta",
        "backtracks",
        "data_term",
        "l0_count",
        "l12_term",
        "constraint_residual",
        "snr",
        "ssim",
        "hfen",
        "wall_ms",
    ])
    .map_err(io_err)?;
    for r in log {
        w.write_record([
            r.iter.to_string(),
            fmt(r.tau),
            fmt(r.theta),
            r.backtracks.to_string(),
            fmt(r.data_term),
            r.l0_count.to_string(),
            fmt(r.l12_term),
            fmt(r.constraint_residual),
            fmt(r.snr),
            fmt(r.ssim),
            fmt(r.hfen),
            fmt(r.wall_ms),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

fn fmt(x: f64) -> String {
    // Shortest round-trip representation keeps the CSV lossless.
    format!("{x}")
}

fn io_err(e: csv::Error) -> csmri_core::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => csmri_core::Error::Io(io),
        other => csmri_core::Error::Format {
            path: String::new(),
            format: "csv",
            reason: format!("{other:?}"),
        },
    }
}

/// Outcome of [`audit_linesearch`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinesearchAudit {
    /// Iterations checked.
    pub accepted: usize,
    /// Total rejected trials across all iterations.
    pub rejections: usize,
    /// Human-readable descriptions of every violation found (empty on a
    /// clean log).
    pub violations: Vec<String>,
}

impl LinesearchAudit {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-check the linesearch contract from a completed log: every accepted
/// step must satisfy its recorded acceptance inequality, and the accepted
/// step must equal the initial trial shrunk by exactly `mu` per rejection.
pub fn audit_linesearch(log: &[IterRecord], mu: f64) -> LinesearchAudit {
    let mut audit = LinesearchAudit::default();
    for r in log {
        audit.accepted += 1;
        audit.rejections += r.backtracks;
        if !(r.accept_lhs <= r.accept_rhs) {
            audit.violations.push(format!(
                "iter {}: accepted step violates the inequality ({} > {})",
                r.iter, r.accept_lhs, r.accept_rhs
            ));
        }
        let expected = r.tau_initial * mu.powi(r.backtracks as i32);
        let tol = 1e-12 * expected.abs().max(r.tau.abs());
        if (r.tau - expected).abs() > tol {
            audit.violations.push(format!(
                "iter {}: accepted tau {} is not the initial trial {} shrunk by mu^{}",
                r.iter, r.tau, r.tau_initial, r.backtracks
            ));
        }
    }
    audit
}
