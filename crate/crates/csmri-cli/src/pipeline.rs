//! Shared experiment plumbing: reference image, mask, simulated k-space,
//! solver dispatch, artifact emission.

use crate::config::{ConfigError, ExperimentConfig};
use crate::io;
use csmri_core::{Mask, RealImage};
use csmri_operators::SamplingOp;
use csmri_simulate::{achieved_rate, make_mask, shepp_logan, simulate_kspace};
use csmri_solvers::{gadmm, mp_variant, ReconResult};
use std::path::Path;

/// Everything the solver commands need from the config preamble.
pub struct Prepared {
    pub reference: RealImage,
    pub mask: Mask,
    pub rate: f64,
    pub b: csmri_core::ComplexImage,
}

/// A run failure is either a bad configuration (exit 2) or a solver abort
/// (exit 3); IO problems while writing artifacts count as aborts.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Solver(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Solver(m) => write!(f, "run failed: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

pub fn io_abort(context: &str, e: std::io::Error) -> RunError {
    RunError::Solver(format!("{context}: {e}"))
}

/// Build the reference image named by `[input]`.
pub fn load_input(cfg: &ExperimentConfig) -> Result<RealImage, RunError> {
    match cfg.input.kind.as_str() {
        "phantom" => {
            let n = cfg.input.n.unwrap_or(0);
            shepp_logan(n).map_err(|e| RunError::Config(format!("input: {e}")))
        }
        "grid" => {
            let path = cfg.input.path.as_deref().unwrap_or(Path::new(""));
            let img = io::read_grid(path)
                .map_err(|e| RunError::Config(format!("input: {e}")))?;
            if img.nrows() != img.ncols() {
                return Err(RunError::Config(format!(
                    "input: image must be square, got {}x{}",
                    img.nrows(),
                    img.ncols()
                )));
            }
            Ok(img)
        }
        other => Err(RunError::Config(format!("input.kind '{other}'"))),
    }
}

/// Build the sampling mask named by `[mask]` at size `n`.
pub fn build_mask(cfg: &ExperimentConfig, n: usize) -> Result<Mask, RunError> {
    match cfg.mask_spec()? {
        Some(spec) => make_mask(&spec, n, cfg.mask.symmetrize)
            .map_err(|e| RunError::Config(format!("mask: {e}"))),
        None => Ok(Mask::from_elem((n, n), true)),
    }
}

/// Reference image → mask → simulated noisy k-space.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, RunError> {
    let reference = load_input(cfg)?;
    let n = reference.nrows();
    let mask = build_mask(cfg, n)?;
    let rate = achieved_rate(&mask);
    let b = simulate_kspace(&reference, &mask, cfg.noise.sigma, cfg.noise.seed);
    Ok(Prepared {
        reference,
        mask,
        rate,
        b,
    })
}

/// Run the solver selected by `[solver]` on prepared data.
pub fn run_solver(
    cfg: &ExperimentConfig,
    prep: &Prepared,
    with_metrics: bool,
) -> Result<ReconResult, RunError> {
    let reference = with_metrics.then_some(&prep.reference);
    let result = match cfg.solver.kind.as_str() {
        "mp" => {
            let mode = cfg.mp_mode()?;
            mp_variant(&prep.b, &prep.mask, &cfg.mp_config(), mode, reference)
        }
        "gadmm" => gadmm(&prep.b, &prep.mask, &cfg.gadmm_config(), reference),
        other => return Err(RunError::Config(format!("solver.kind '{other}'"))),
    };
    result.map_err(|e| RunError::Solver(e.to_string()))
}

/// Zero-filled reconstruction of the prepared data (the solver-free
/// baseline).
pub fn zero_fill(prep: &Prepared) -> RealImage {
    SamplingOp::new(prep.mask.clone()).zero_fill(&prep.b)
}

/// Write the standard artifact set for one reconstruction into `dir`:
/// final image (PGM + grid), per-iteration CSV, gnuplot script, and —
/// when a reference is available — the absolute error map. Returns the
/// artifact file names.
pub fn write_recon_artifacts(
    dir: &Path,
    stem: &str,
    result: &ReconResult,
    reference: Option<&RealImage>,
) -> Result<Vec<String>, RunError> {
    std::fs::create_dir_all(dir).map_err(|e| io_abort("creating output dir", e))?;
    let mut outputs = Vec::new();

    let pgm = format!("{stem}.pgm");
    io::write_pgm_p5(&dir.join(&pgm), &result.u).map_err(|e| io_abort("writing image", e))?;
    outputs.push(pgm);

    let grid = format!("{stem}.grid");
    io::write_grid(&dir.join(&grid), &result.u).map_err(|e| io_abort("writing grid", e))?;
    outputs.push(grid);

    let csv = format!("{stem}_log.csv");
    csmri_solvers::write_csv(&dir.join(&csv), &result.log)
        .map_err(|e| RunError::Solver(format!("writing log: {e}")))?;
    outputs.push(csv.clone());

    let gp = format!("{stem}_plot.gp");
    io::write_gnuplot_script(&dir.join(&gp), &csv).map_err(|e| io_abort("writing script", e))?;
    outputs.push(gp);

    if let Some(reference) = reference {
        let err = format!("{stem}_error.pgm");
        io::write_pgm_p2(&dir.join(&err), &io::error_map(&result.u, reference))
            .map_err(|e| io_abort("writing error map", e))?;
        outputs.push(err);
    }
    Ok(outputs)
}

/// One-line run summary: the contract is "final SNR/SSIM/HFEN, wall time".
pub fn summary_line(
    label: &str,
    result: &ReconResult,
    reference: Option<&RealImage>,
    wall_seconds: f64,
) -> String {
    let metrics = match reference {
        Some(reference) => {
            let report = csmri_metrics::evaluate(&result.u, reference);
            match report {
                Ok(r) => format!(
                    "snr {:.2} dB  ssim {:.4}  hfen {:.4}",
                    r.snr_db, r.ssim, r.hfen
                ),
                Err(_) => "metrics unavailable".to_string(),
            }
        }
        None => "metrics disabled".to_string(),
    };
    format!(
        "{label}: {metrics}  iters {}  converged {}  wall {:.1}s",
        result.log.len(),
        result.converged,
        wall_seconds
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        toml::from_str(
            r#"
[input]
kind = "phantom"
n = 32

[mask]
kind = "radial"
spokes = 8
"#,
        )
        .unwrap()
    }

    #[test]
    fn prepare_builds_consistent_shapes() {
        let cfg = small_cfg();
        let prep = prepare(&cfg).unwrap();
        assert_eq!(prep.reference.dim(), (32, 32));
        assert_eq!(prep.mask.dim(), (32, 32));
        assert_eq!(prep.b.dim(), (32, 32));
        assert!(prep.rate > 0.0 && prep.rate < 1.0);
        // Unsampled entries carry no data.
        for (m, v) in prep.mask.iter().zip(prep.b.iter()) {
            if !*m {
                assert_eq!(v.norm(), 0.0);
            }
        }
    }

    #[test]
    fn full_mask_kind_samples_everything() {
        let mut cfg = small_cfg();
        cfg.mask.kind = "full".into();
        cfg.mask.spokes = None;
        let prep = prepare(&cfg).unwrap();
        assert!(prep.mask.iter().all(|&m| m));
        assert_eq!(prep.rate, 1.0);
    }

    #[test]
    fn artifacts_land_on_disk() {
        let mut cfg = small_cfg();
        cfg.solver.iters = 2;
        cfg.solver.mode = "ritv_only".into();
        let prep = prepare(&cfg).unwrap();
        let result = run_solver(&cfg, &prep, true).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let outputs =
            write_recon_artifacts(dir.path(), "u", &result, Some(&prep.reference)).unwrap();
        assert_eq!(
            outputs,
            vec![
                "u.pgm".to_string(),
                "u.grid".into(),
                "u_log.csv".into(),
                "u_plot.gp".into(),
                "u_error.pgm".into()
            ]
        );
        for name in &outputs {
            assert!(dir.path().join(name).exists(), "{name} missing");
        }
        // The emitted grid equals the in-memory image exactly.
        let back = io::read_grid(&dir.path().join("u.grid")).unwrap();
        assert_eq!(back, result.u);
    }
}
