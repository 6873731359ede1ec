//! The five subcommands: reconstruct, isotropy, benchmark, mask, metrics.

use crate::config::{parse_mode, ExperimentConfig, Overrides};
use crate::io;
use crate::manifest::{sha256_hex, Manifest, Versions};
use crate::pipeline::{
    self, io_abort, prepare, run_solver, summary_line, write_recon_artifacts, Prepared, RunError,
};
use csmri_core::RealImage;
use csmri_functionals::{ritv_value, tv_value, RitvParams};
use csmri_operators::{kspace_rot90, rotate90_k};
use csmri_simulate::{achieved_rate, make_mask, simulate_kspace, MaskSpec};
use csmri_solvers::{gadmm, mp_variant, IterRecord, ReconResult};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

fn image_norm(u: &RealImage) -> f64 {
    u.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `recon reconstruct <cfg>`: one solver run with the full artifact set.
pub fn cmd_reconstruct(cfg_path: &Path, overrides: &Overrides) -> Result<(), RunError> {
    let (cfg, bytes) = ExperimentConfig::load(cfg_path, overrides)?;
    let dir = cfg.output_dir()?.to_path_buf();
    let start = Instant::now();

    let prep = prepare(&cfg)?;
    let result = run_solver(&cfg, &prep, cfg.metrics.enabled)?;
    let wall = start.elapsed().as_secs_f64();

    let reference = cfg.metrics.enabled.then_some(&prep.reference);
    let mut outputs = write_recon_artifacts(&dir, "u", &result, reference)?;

    io::write_mask_pgm(&dir.join("mask.pgm"), &prep.mask)
        .map_err(|e| io_abort("writing mask", e))?;
    outputs.push("mask.pgm".into());

    let mut summary = summary_line("reconstruct", &result, reference, wall);
    if cfg.metrics.enabled {
        let baseline = pipeline::zero_fill(&prep);
        if let Ok(s) = csmri_metrics::snr_capped(&baseline, &prep.reference) {
            let _ = write!(summary, "  (zero-fill baseline {s:.2} dB)");
        }
    }
    std::fs::write(dir.join("summary.txt"), format!("{summary}\n"))
        .map_err(|e| io_abort("writing summary", e))?;
    outputs.push("summary.txt".into());

    write_manifest(&dir, "reconstruct", &bytes, &cfg, prep.rate, wall, outputs)?;
    println!("{summary}");
    Ok(())
}

/// `recon isotropy <cfg>`: upright vs rotated acquisition of the same
/// scene, the rotation-invariance deficit between the two
/// reconstructions, and a TV/RITV value table for the scene.
pub fn cmd_isotropy(cfg_path: &Path, overrides: &Overrides) -> Result<(), RunError> {
    let (cfg, bytes) = ExperimentConfig::load(cfg_path, overrides)?;
    let dir = cfg.output_dir()?.to_path_buf();
    std::fs::create_dir_all(&dir).map_err(|e| io_abort("creating output dir", e))?;
    let start = Instant::now();
    let turns = cfg.isotropy.quarter_turns as usize;

    // Upright acquisition.
    let prep = prepare(&cfg)?;
    let up = run_solver(&cfg, &prep, cfg.metrics.enabled)?;

    // Rotated acquisition: the scene rotates in image space, so its
    // spectrum rotates on the frequency grid; the acquisition mask is
    // rotated the same way (a symmetrized mask is its own rotation).
    let ref_rot = rotate90_k(&prep.reference, turns);
    let mut mask_rot = prep.mask.clone();
    for _ in 0..turns {
        mask_rot = kspace_rot90(&mask_rot);
    }
    let b_rot = simulate_kspace(&ref_rot, &mask_rot, cfg.noise.sigma, cfg.noise.seed);
    let prep_rot = Prepared {
        reference: ref_rot,
        mask: mask_rot,
        rate: prep.rate,
        b: b_rot,
    };
    let rot = run_solver(&cfg, &prep_rot, cfg.metrics.enabled)?;
    let wall = start.elapsed().as_secs_f64();

    // Invariance deficit: rotate the upright reconstruction into the
    // rotated frame and compare.
    let up_rotated = rotate90_k(&up.u, turns);
    let deficit = image_norm(&(&rot.u - &up_rotated)) / image_norm(&up.u).max(f64::MIN_POSITIVE);

    // Functional value table for the scene itself.
    let params = RitvParams {
        iters: cfg.isotropy.functional_iters,
        ..RitvParams::default()
    };
    let scene = &prep.reference;
    let scene_rot = rotate90_k(scene, 1);
    let ritv_up = ritv_value(scene, &params, None)
        .map_err(|e| RunError::Solver(format!("functional: {e}")))?;
    // Mapped warm start: the rotated decomposition of the rotated scene.
    let init = ritv_up.state.quarter_turn();
    let ritv_rot = ritv_value(&scene_rot, &params, Some(&init))
        .map_err(|e| RunError::Solver(format!("functional: {e}")))?;
    let tv_up = tv_value(scene);
    let tv_rot = tv_value(&scene_rot);

    let mut outputs = Vec::new();
    for (stem, result, reference) in [
        ("upright", &up, &prep.reference),
        ("rotated", &rot, &prep_rot.reference),
    ] {
        let reference = cfg.metrics.enabled.then_some(reference);
        outputs.extend(write_recon_artifacts(&dir, stem, result, reference)?);
    }

    let mut table = String::new();
    let _ = writeln!(table, "quantity,upright,rotated,relative_gap");
    let ritv_gap = (ritv_rot.value - ritv_up.value).abs() / ritv_up.value.abs().max(f64::MIN_POSITIVE);
    let tv_gap = (tv_rot - tv_up).abs() / tv_up.abs().max(f64::MIN_POSITIVE);
    let _ = writeln!(table, "ritv,{},{},{ritv_gap}", ritv_up.value, ritv_rot.value);
    let _ = writeln!(table, "tv,{tv_up},{tv_rot},{tv_gap}");
    std::fs::write(dir.join("functionals.csv"), &table)
        .map_err(|e| io_abort("writing functional table", e))?;
    outputs.push("functionals.csv".into());

    let up_line = summary_line("upright", &up, cfg.metrics.enabled.then_some(&prep.reference), wall);
    let rot_line = summary_line(
        "rotated",
        &rot,
        cfg.metrics.enabled.then_some(&prep_rot.reference),
        wall,
    );
    let summary = format!(
        "{up_line}\n{rot_line}\ninvariance deficit {deficit:.3e}\nritv {} vs {} (rel gap {ritv_gap:.3e})\ntv {tv_up} vs {tv_rot} (rel gap {tv_gap:.3e})\n",
        ritv_up.value, ritv_rot.value
    );
    std::fs::write(dir.join("summary.txt"), &summary)
        .map_err(|e| io_abort("writing summary", e))?;
    outputs.push("summary.txt".into());

    write_manifest(&dir, "isotropy", &bytes, &cfg, prep.rate, wall, outputs)?;
    print!("{summary}");
    Ok(())
}

/// `recon benchmark <cfg>`: the configured solver variants and the GADMM
/// penalty list on identical data; emits a per-iteration comparison CSV
/// (deterministic: no wall-clock columns) and a summary table with
/// max/final SNR and the SNR drop per method.
pub fn cmd_benchmark(cfg_path: &Path, overrides: &Overrides) -> Result<(), RunError> {
    let (cfg, bytes) = ExperimentConfig::load(cfg_path, overrides)?;
    let dir = cfg.output_dir()?.to_path_buf();
    std::fs::create_dir_all(&dir).map_err(|e| io_abort("creating output dir", e))?;
    let start = Instant::now();

    let prep = prepare(&cfg)?;
    let mut runs: Vec<(String, ReconResult)> = Vec::new();

    for mode_name in &cfg.benchmark.modes {
        let mode = parse_mode(mode_name)?;
        let result = mp_variant(&prep.b, &prep.mask, &cfg.mp_config(), mode, Some(&prep.reference))
            .map_err(|e| RunError::Solver(format!("mp {mode_name}: {e}")))?;
        runs.push((format!("mp_{mode_name}"), result));
    }
    for &penalty in &cfg.benchmark.gadmm_penalties {
        let mut gcfg = cfg.gadmm_config();
        gcfg.mu = penalty;
        let result = gadmm(&prep.b, &prep.mask, &gcfg, Some(&prep.reference))
            .map_err(|e| RunError::Solver(format!("gadmm mu={penalty:.0e}: {e}")))?;
        runs.push((format!("gadmm_mu{penalty:.0e}"), result));
    }
    let wall = start.elapsed().as_secs_f64();

    // Long-format per-iteration comparison (deterministic columns only).
    let mut comparison = String::from("method,iter,snr,ssim,hfen,data_term,l0_count,l12_term\n");
    for (name, result) in &runs {
        for r in &result.log {
            let _ = writeln!(
                comparison,
                "{name},{},{},{},{},{},{},{}",
                r.iter, r.snr, r.ssim, r.hfen, r.data_term, r.l0_count, r.l12_term
            );
        }
    }
    std::fs::write(dir.join("comparison.csv"), &comparison)
        .map_err(|e| io_abort("writing comparison", e))?;

    // Summary table: max SNR, final SNR, drop = max - final.
    let mut summary_csv = String::from("method,max_snr,final_snr,snr_drop\n");
    let mut summary_text = String::new();
    let stats = |log: &[IterRecord]| -> (f64, f64) {
        let max = log.iter().map(|r| r.snr).fold(f64::NEG_INFINITY, f64::max);
        let fin = log.last().map_or(f64::NEG_INFINITY, |r| r.snr);
        (max, fin)
    };
    for (name, result) in &runs {
        let (max, fin) = stats(&result.log);
        let _ = writeln!(summary_csv, "{name},{max},{fin},{}", max - fin);
        let _ = writeln!(
            summary_text,
            "{name}: max {max:.2} dB  final {fin:.2} dB  drop {:.2} dB",
            max - fin
        );
    }
    let mp_final = runs
        .iter()
        .find(|(n, _)| n == "mp_full")
        .map(|(_, r)| stats(&r.log).1);
    let best_gadmm = runs
        .iter()
        .filter(|(n, _)| n.starts_with("gadmm"))
        .map(|(_, r)| stats(&r.log).1)
        .fold(f64::NEG_INFINITY, f64::max);
    if let Some(mp_final) = mp_final {
        if best_gadmm.is_finite() {
            let _ = writeln!(
                summary_text,
                "gap mp_full - best gadmm: {:.2} dB",
                mp_final - best_gadmm
            );
        }
    }
    std::fs::write(dir.join("summary.csv"), &summary_csv)
        .map_err(|e| io_abort("writing summary csv", e))?;
    std::fs::write(dir.join("summary.txt"), &summary_text)
        .map_err(|e| io_abort("writing summary", e))?;

    let mut outputs = vec![
        "comparison.csv".to_string(),
        "summary.csv".into(),
        "summary.txt".into(),
    ];
    for (name, result) in &runs {
        outputs.extend(write_recon_artifacts(&dir, name, result, Some(&prep.reference))?);
    }

    write_manifest(&dir, "benchmark", &bytes, &cfg, prep.rate, wall, outputs)?;
    print!("{summary_text}");
    Ok(())
}

/// `recon mask <spec> --size <n> [--symmetrize] -o <file>`: emit a mask.
/// Spec strings: `radial:<spokes>`, `cartesian:<rate>[:<seed>]`,
/// `spiral:<rate>`.
pub fn cmd_mask(
    spec: &str,
    n: usize,
    symmetrize: bool,
    out: &Path,
) -> Result<(), RunError> {
    let parsed = parse_mask_spec(spec)?;
    let mask =
        make_mask(&parsed, n, symmetrize).map_err(|e| RunError::Config(format!("mask: {e}")))?;
    let rate = achieved_rate(&mask);
    match out.extension().and_then(|e| e.to_str()) {
        Some("pgm") => io::write_mask_pgm(out, &mask).map_err(|e| io_abort("writing mask", e))?,
        _ => io::write_mask_grid(out, &mask).map_err(|e| io_abort("writing mask", e))?,
    }
    println!(
        "mask {spec} at {n}x{n}: {} samples (rate {rate:.4}) -> {}",
        mask.iter().filter(|&&m| m).count(),
        out.display()
    );
    Ok(())
}

pub fn parse_mask_spec(spec: &str) -> Result<MaskSpec, RunError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || RunError::Config(format!("mask spec '{spec}' (expected radial:<spokes>, cartesian:<rate>[:<seed>], or spiral:<rate>)"));
    match parts.as_slice() {
        ["radial", spokes] => Ok(MaskSpec::Radial {
            spokes: spokes.parse().map_err(|_| bad())?,
        }),
        ["cartesian", rate] => Ok(MaskSpec::Cartesian {
            rate: rate.parse().map_err(|_| bad())?,
            seed: 0,
        }),
        ["cartesian", rate, seed] => Ok(MaskSpec::Cartesian {
            rate: rate.parse().map_err(|_| bad())?,
            seed: seed.parse().map_err(|_| bad())?,
        }),
        ["spiral", rate] => Ok(MaskSpec::Spiral {
            rate: rate.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

/// `recon metrics <img> <ref>`: SNR/SSIM/HFEN of one grid image against
/// another.
pub fn cmd_metrics(img_path: &Path, ref_path: &Path) -> Result<(), RunError> {
    let img = io::read_grid(img_path).map_err(|e| RunError::Config(format!("image: {e}")))?;
    let reference = io::read_grid(ref_path).map_err(|e| RunError::Config(format!("reference: {e}")))?;
    let report = csmri_metrics::evaluate(&img, &reference)
        .map_err(|e| RunError::Config(format!("metrics: {e}")))?;
    println!(
        "snr {:.4} dB  ssim {:.6}  hfen {:.6}",
        report.snr_db, report.ssim, report.hfen
    );
    Ok(())
}

fn write_manifest(
    dir: &Path,
    command: &str,
    config_bytes: &[u8],
    cfg: &ExperimentConfig,
    mask_rate: f64,
    wall: f64,
    mut outputs: Vec<String>,
) -> Result<(), RunError> {
    outputs.push("manifest.json".into());
    outputs.sort();
    outputs.dedup();
    let manifest = Manifest {
        command: command.into(),
        config_sha256: sha256_hex(config_bytes),
        seed: cfg.noise.seed,
        versions: Versions::current(),
        mask_rate,
        wall_seconds: wall,
        outputs,
    };
    manifest
        .write(&dir.join("manifest.json"))
        .map_err(|e| io_abort("writing manifest", e))
}

/// Exit code for a failed run per the documented contract.
pub fn exit_code(e: &RunError) -> i32 {
    match e {
        RunError::Config(_) => 2,
        RunError::Solver(_) => 3,
    }
}
