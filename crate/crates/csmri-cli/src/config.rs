//! Experiment configuration: a TOML schema that maps one-to-one onto the
//! library's solver/mask/frame parameter structs.
//!
//! Schema (all sections optional unless noted; defaults in parentheses):
//!
//! ```toml
//! [input]                # required
//! kind = "phantom"       # "phantom" | "grid"
//! n = 128                # phantom size (phantom kind)
//! # path = "u0.grid"     # image path (grid kind)
//!
//! [mask]                 # required
//! kind = "radial"        # "radial" | "cartesian" | "spiral" | "full"
//! spokes = 12            # radial
//! # rate = 0.3           # cartesian / spiral
//! # seed = 7             # cartesian row draw (0)
//! symmetrize = false     # close under the frequency-grid quarter turn
//!
//! [noise]
//! sigma = 0.0            # complex k-space noise level (0)
//! seed = 0               # noise stream seed (0)
//!
//! [solver]
//! kind = "mp"            # "mp" | "gadmm"
//! mode = "full"          # mp only: "full" | "bm3d_only" | "ritv_only"
//! iters = 300
//! eta = 0.2              # frame sparsity weight
//! lambda = 0.00014286    # split-field group-sparsity weight (1e-3/7)
//! beta = 0.016           # mp dual/primal stepsize ratio
//! tau0 = 1.1428          # mp initial stepsize (8/7)
//! delta = 0.99           # mp linesearch acceptance slack
//! backtrack = 0.7        # mp linesearch shrink factor
//! step_ratio = 1.0       # mp stepsize growth aggressiveness
//! max_backtracks = 50
//! rel_change_tol = 1e-8  # relative-change early exit; 0 disables it
//! frozen_codebook = false
//! shrinkage = "exact"    # "exact" | "unscaled" group shrink variant
//! penalty = 1e4          # gadmm constraint penalty
//!
//! [frame]
//! patch = 8
//! step = 3
//! search_radius = 19
//! max_group = 16
//! match_threshold = 0.25
//!
//! [metrics]
//! enabled = true         # per-iteration SNR/SSIM/HFEN against the input
//!
//! [output]               # required for reconstruct/isotropy/benchmark
//! dir = "out/run"
//!
//! [benchmark]            # benchmark command only
//! gadmm_penalties = [1e2, 1e4, 1e6]
//! modes = ["full", "bm3d_only", "ritv_only"]
//!
//! [isotropy]             # isotropy command only
//! quarter_turns = 1      # 0..=3 quarter turns for the rotated acquisition
//! functional_iters = 2000  # dual-ascent iterations for the value table
//! ```
//!
//! The schema round-trips losslessly: parse → serialize → parse is
//! identity (checked by a unit test).

use csmri_bm3d::FrameParams;
use csmri_prox::GroupShrinkage;
use csmri_simulate::MaskSpec;
use csmri_solvers::{GADMMConfig, MPConfig, MPMode};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Configuration errors are reported with the offending field's path.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub input: InputSection,
    pub mask: MaskSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub frame: FrameSection,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub benchmark: BenchmarkSection,
    #[serde(default)]
    pub isotropy: IsotropySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spokes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub symmetrize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub sigma: f64,
    pub seed: u64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection { sigma: 0.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub kind: String,
    pub mode: String,
    pub iters: usize,
    pub eta: f64,
    pub lambda: f64,
    pub beta: f64,
    pub tau0: f64,
    pub delta: f64,
    pub backtrack: f64,
    pub step_ratio: f64,
    pub max_backtracks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_change_tol: Option<f64>,
    pub frozen_codebook: bool,
    pub shrinkage: String,
    pub penalty: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let mp = MPConfig::default();
        let ga = GADMMConfig::default();
        SolverSection {
            kind: "mp".into(),
            mode: "full".into(),
            iters: mp.max_iters,
            eta: mp.eta,
            lambda: mp.lambda,
            beta: mp.beta,
            tau0: mp.tau0,
            delta: mp.delta,
            backtrack: mp.mu,
            step_ratio: mp.step_ratio,
            max_backtracks: mp.max_linesearch_backtracks,
            rel_change_tol: mp.rel_change_tol,
            frozen_codebook: false,
            shrinkage: "exact".into(),
            penalty: ga.mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameSection {
    pub patch: usize,
    pub step: usize,
    pub search_radius: usize,
    pub max_group: usize,
    pub match_threshold: f64,
}

impl Default for FrameSection {
    fn default() -> Self {
        let f = FrameParams::default();
        FrameSection {
            patch: f.patch,
            step: f.step,
            search_radius: f.search_radius,
            max_group: f.max_group,
            match_threshold: f.match_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsSection {
    pub enabled: bool,
}

impl Default for MetricsSection {
    fn default() -> Self {
        MetricsSection { enabled: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkSection {
    pub gadmm_penalties: Vec<f64>,
    pub modes: Vec<String>,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        BenchmarkSection {
            gadmm_penalties: vec![1e2, 1e4, 1e6],
            modes: vec!["full".into(), "bm3d_only".into(), "ritv_only".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsotropySection {
    pub quarter_turns: u32,
    pub functional_iters: usize,
}

impl Default for IsotropySection {
    fn default() -> Self {
        IsotropySection {
            quarter_turns: 1,
            functional_iters: 2000,
        }
    }
}

/// Command-line overrides applied on top of the parsed file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub iters: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parse a config file, apply overrides, and validate.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<(Self, Vec<u8>), ConfigError> {
        let bytes = std::fs::read(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| ConfigError(format!("{} is not UTF-8: {e}", path.display())))?;
        let mut cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        if let Some(seed) = overrides.seed {
            cfg.noise.seed = seed;
        }
        if let Some(iters) = overrides.iters {
            cfg.solver.iters = iters;
        }
        if let Some(out) = &overrides.out {
            cfg.output.dir = Some(out.clone());
        }
        cfg.validate()?;
        Ok((cfg, bytes))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.input.kind.as_str() {
            "phantom" => {
                if self.input.n.is_none() {
                    return err("input.n is required for the phantom input");
                }
            }
            "grid" => {
                let Some(p) = &self.input.path else {
                    return err("input.path is required for the grid input");
                };
                if !p.exists() {
                    return err(format!("input.path {} does not exist", p.display()));
                }
            }
            other => return err(format!("input.kind '{other}' (expected phantom|grid)")),
        }
        match self.mask.kind.as_str() {
            "radial" => {
                if self.mask.spokes.is_none() {
                    return err("mask.spokes is required for the radial mask");
                }
            }
            "cartesian" | "spiral" => {
                if self.mask.rate.is_none() {
                    return err(format!("mask.rate is required for the {} mask", self.mask.kind));
                }
            }
            "full" => {}
            other => {
                return err(format!(
                    "mask.kind '{other}' (expected radial|cartesian|spiral|full)"
                ))
            }
        }
        if !(self.noise.sigma >= 0.0) {
            return err("noise.sigma must be >= 0");
        }
        if let Some(tol) = self.solver.rel_change_tol {
            if !(tol >= 0.0) {
                return err("solver.rel_change_tol must be >= 0 (0 disables the early exit)");
            }
        }
        match self.solver.kind.as_str() {
            "mp" => {
                self.mp_config()
                    .validate()
                    .map_err(|e| ConfigError(format!("solver: {e}")))?;
                self.mp_mode()?;
            }
            "gadmm" => {
                self.gadmm_config()
                    .validate()
                    .map_err(|e| ConfigError(format!("solver: {e}")))?;
            }
            other => return err(format!("solver.kind '{other}' (expected mp|gadmm)")),
        }
        self.shrinkage()?;
        for m in &self.benchmark.modes {
            parse_mode(m)?;
        }
        if self.benchmark.gadmm_penalties.iter().any(|&m| !(m > 0.0)) {
            return err("benchmark.gadmm_penalties must be positive");
        }
        if self.isotropy.quarter_turns > 3 {
            return err("isotropy.quarter_turns must be 0..=3");
        }
        if self.isotropy.functional_iters == 0 {
            return err("isotropy.functional_iters must be positive");
        }
        Ok(())
    }

    pub fn frame_params(&self) -> FrameParams {
        FrameParams {
            patch: self.frame.patch,
            step: self.frame.step,
            search_radius: self.frame.search_radius,
            max_group: self.frame.max_group,
            match_threshold: self.frame.match_threshold,
        }
    }

    pub fn shrinkage(&self) -> Result<GroupShrinkage, ConfigError> {
        match self.solver.shrinkage.as_str() {
            "exact" => Ok(GroupShrinkage::Exact),
            "unscaled" => Ok(GroupShrinkage::Unscaled),
            other => err(format!("solver.shrinkage '{other}' (expected exact|unscaled)")),
        }
    }

    pub fn mp_config(&self) -> MPConfig {
        MPConfig {
            eta: self.solver.eta,
            lambda: self.solver.lambda,
            mu: self.solver.backtrack,
            delta: self.solver.delta,
            beta: self.solver.beta,
            tau0: self.solver.tau0,
            max_iters: self.solver.iters,
            max_linesearch_backtracks: self.solver.max_backtracks,
            step_ratio: self.solver.step_ratio,
            // A zero tolerance disables the early exit (TOML cannot omit
            // a field that has a non-empty default).
            rel_change_tol: self.solver.rel_change_tol.filter(|&t| t > 0.0),
            frame: self.frame_params(),
            frozen_codebook: self.solver.frozen_codebook,
            shrinkage: self.shrinkage().unwrap_or(GroupShrinkage::Exact),
        }
    }

    pub fn gadmm_config(&self) -> GADMMConfig {
        GADMMConfig {
            mu: self.solver.penalty,
            eta: self.solver.eta,
            lambda: self.solver.lambda,
            max_iters: self.solver.iters,
            frame: self.frame_params(),
            frozen_codebook: self.solver.frozen_codebook,
            shrinkage: self.shrinkage().unwrap_or(GroupShrinkage::Exact),
        }
    }

    pub fn mp_mode(&self) -> Result<MPMode, ConfigError> {
        parse_mode(&self.solver.mode)
    }

    pub fn mask_spec(&self) -> Result<Option<MaskSpec>, ConfigError> {
        Ok(match self.mask.kind.as_str() {
            "radial" => Some(MaskSpec::Radial {
                spokes: self.mask.spokes.unwrap_or(0),
            }),
            "cartesian" => Some(MaskSpec::Cartesian {
                rate: self.mask.rate.unwrap_or(0.0),
                seed: self.mask.seed.unwrap_or(0),
            }),
            "spiral" => Some(MaskSpec::Spiral {
                rate: self.mask.rate.unwrap_or(0.0),
            }),
            "full" => None,
            other => return err(format!("mask.kind '{other}'")),
        })
    }

    pub fn output_dir(&self) -> Result<&Path, ConfigError> {
        self.output
            .dir
            .as_deref()
            .ok_or_else(|| ConfigError("output.dir is required for this command".into()))
    }
}

pub fn parse_mode(mode: &str) -> Result<MPMode, ConfigError> {
    match mode {
        "full" => Ok(MPMode::Full),
        "bm3d_only" => Ok(MPMode::Bm3dOnly),
        "ritv_only" => Ok(MPMode::RitvOnly),
        other => err(format!(
            "solver.mode '{other}' (expected full|bm3d_only|ritv_only)"
        )),
    }
}
