//! End-to-end acceptance suite.
//!
//! Each test verifies one advertised guarantee of the toolkit, enforces
//! the stated numerical tolerance and a wall-clock ceiling, and prints a
//! single `criterion NN (<label>): PASS — <details>` line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use csmri_bm3d::{Codebook, FrameParams};
use csmri_core::{ComplexImage, GradientField, Mask, RealImage};
use csmri_functionals::{ritv_value, tv_value, RitvParams};
use csmri_metrics::{hfen, snr, snr_capped, ssim, SNR_CAP_DB};
use csmri_operators::dense::{
    dense_align, dense_align_adjoint, dense_gradient, dense_gradient_adjoint,
};
use csmri_operators::{
    align, align_adjoint, align_adjoint_sum, c_norm_sq, gradient, gradient_adjoint, kspace_rot90,
    re_dot, rotate90, rotate_field_aligned, rotate_field_offset, rotate_field_staggered,
    rotated_lattice, Dft2, Lattice, SamplingOp,
};
use csmri_prox::{prox_conjugate_quadratic, prox_group_soft};
use csmri_simulate::{radial_mask, shepp_logan, simulate_kspace, symmetrize90};
use csmri_solvers::{audit_linesearch, gadmm, mp_variant, GADMMConfig, MPConfig, MPMode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Weights of the shipped 12-spoke benchmark configuration, shared by both
/// solvers wherever the criteria compare them.
const BENCH_ETA: f64 = 3e-4;
const BENCH_LAMBDA: f64 = 3e-4;
const BENCH_BETA: f64 = 5e-5;

fn pass(criterion: usize, label: &str, details: String) {
    println!("criterion {criterion:02} ({label}): PASS — {details}");
}

fn check_time(criterion: usize, started: Instant, limit_s: f64) -> f64 {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < limit_s,
        "criterion {criterion:02}: runtime {elapsed:.1}s exceeds the {limit_s:.0}s ceiling"
    );
    elapsed
}

fn rand_image(n: usize, rng: &mut ChaCha8Rng) -> RealImage {
    RealImage::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0))
}

fn rand_field(n: usize, rng: &mut ChaCha8Rng) -> GradientField {
    GradientField::new(rand_image(n, rng), rand_image(n, rng))
}

fn rand_cimage(n: usize, rng: &mut ChaCha8Rng) -> ComplexImage {
    ComplexImage::from_shape_fn((n, n), |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Pseudo-random sampling mask with a guaranteed non-empty support.
fn rand_mask(n: usize, rng: &mut ChaCha8Rng) -> Mask {
    let mut m = Mask::from_shape_fn((n, n), |_| rng.gen_bool(0.4));
    m[[0, 0]] = true;
    m
}

fn image_norm(u: &RealImage) -> f64 {
    u.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// ⟨a, b⟩ − ⟨·,·⟩ discrepancy check: `|⟨Aa,b⟩ − ⟨a,A*b⟩| ≤ tol·‖a‖‖b‖`.
fn assert_adjoint_pair(lhs: f64, rhs: f64, norm_a: f64, norm_b: f64, what: &str, n: usize) {
    let gap = (lhs - rhs).abs();
    let bound = 1e-10 * norm_a * norm_b;
    assert!(
        gap <= bound,
        "{what} at n={n}: |⟨Aa,b⟩−⟨a,A*b⟩| = {gap:.3e} exceeds 1e-10·‖a‖‖b‖ = {bound:.3e}"
    );
}

// ---------------------------------------------------------------------------
// 1: adjoint identities for D, the four alignment maps, the masked Fourier
//    operator, and the stacked saddle operator.
// ---------------------------------------------------------------------------
#[test]
fn criterion_01_adjoint_identities() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0usize;
    for n in [4usize, 8, 16, 64] {
        // Gradient D: image -> field.
        let a = rand_image(n, &mut rng);
        let bf = rand_field(n, &mut rng);
        let lhs = gradient(&a).dot(&bf);
        let rhs = a.iter().zip(gradient_adjoint(&bf).iter()).map(|(x, y)| x * y).sum();
        assert_adjoint_pair(lhs, rhs, image_norm(&a), bf.norm(), "gradient", n);
        checked += 1;

        // Each alignment map L_s: field -> field.
        for lat in Lattice::ALL {
            let af = rand_field(n, &mut rng);
            let bf = rand_field(n, &mut rng);
            let lhs = align(&af, lat).dot(&bf);
            let rhs = af.dot(&align_adjoint(&bf, lat));
            assert_adjoint_pair(lhs, rhs, af.norm(), bf.norm(), lat.name(), n);
            checked += 1;
        }

        // Masked Fourier sampling F_M: image -> complex, with the real
        // inner product on the complex side.
        let op = SamplingOp::new(rand_mask(n, &mut rng));
        let a = rand_image(n, &mut rng);
        let bc = rand_cimage(n, &mut rng);
        let lhs = re_dot(&op.forward(&a), &bc);
        let back = op.adjoint(&bc);
        let rhs = a.iter().zip(back.iter()).map(|(x, y)| x * y).sum();
        assert_adjoint_pair(lhs, rhs, image_norm(&a), c_norm_sq(&bc).sqrt(), "sampling", n);
        checked += 1;

        // Stacked saddle operator K(u, v) = (F_M u, Σ_s L*_s v_s − Du) with
        // adjoint K*(r, h) = (F*_M r − D* h, (L_s h)_s).
        let u = rand_image(n, &mut rng);
        let v: [GradientField; 4] = std::array::from_fn(|_| rand_field(n, &mut rng));
        let r = rand_cimage(n, &mut rng);
        let h = rand_field(n, &mut rng);

        let ku = op.forward(&u);
        let mut kv = align_adjoint_sum(&v);
        kv.axpy(-1.0, &gradient(&u));
        let lhs = re_dot(&ku, &r) + kv.dot(&h);

        let mut ks_u = op.adjoint(&r);
        ks_u -= &gradient_adjoint(&h);
        let mut rhs: f64 = u.iter().zip(ks_u.iter()).map(|(x, y)| x * y).sum();
        for (vs, lat) in v.iter().zip(Lattice::ALL) {
            rhs += vs.dot(&align(&h, lat));
        }
        let norm_a = (image_norm(&u).powi(2) + v.iter().map(|f| f.norm_sq()).sum::<f64>()).sqrt();
        let norm_b = (c_norm_sq(&r) + h.norm_sq()).sqrt();
        assert_adjoint_pair(lhs, rhs, norm_a, norm_b, "stacked", n);
        checked += 1;
    }
    let secs = check_time(1, t, 5.0);
    pass(
        1,
        "adjoint identities",
        format!("{checked} operator/size pairs within 1e-10·‖a‖‖b‖ in {secs:.2}s"),
    );
}

// ---------------------------------------------------------------------------
// 2: dense-matrix oracle — stencil adjoints are exact transposes.
// ---------------------------------------------------------------------------
#[test]
fn criterion_02_dense_transpose_oracle() {
    let t = Instant::now();
    let mut pairs = 0usize;
    for n in 2..=8usize {
        let d = dense_gradient(n);
        let dt = dense_gradient_adjoint(n);
        assert_eq!(d.dim(), (2 * n * n, n * n));
        for r in 0..d.nrows() {
            for c in 0..d.ncols() {
                assert!(
                    d[[r, c]] == dt[[c, r]],
                    "gradient dense adjoint is not the exact transpose at n={n} ({r},{c})"
                );
            }
        }
        pairs += 1;
        for lat in Lattice::ALL {
            let l = dense_align(n, lat);
            let lt = dense_align_adjoint(n, lat);
            for r in 0..l.nrows() {
                for c in 0..l.ncols() {
                    assert!(
                        l[[r, c]] == lt[[c, r]],
                        "{} dense adjoint is not the exact transpose at n={n} ({r},{c})",
                        lat.name()
                    );
                }
            }
            // Stencil weights stay on the exact dyadic grid k/4.
            for &x in l.iter() {
                assert_eq!(4.0 * x, (4.0 * x).round(), "{}: weight {x}", lat.name());
            }
            pairs += 1;
        }
    }
    let secs = check_time(2, t, 10.0);
    pass(
        2,
        "dense transpose oracle",
        format!("{pairs} operator matrices bitwise-transposed, n = 2..=8, in {secs:.2}s"),
    );
}

// ---------------------------------------------------------------------------
// 3: rotation-commutation identities for all four alignment maps.
// ---------------------------------------------------------------------------
#[test]
fn criterion_03_rotation_commutation() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut checked = 0usize;
    for n in [5usize, 8, 16] {
        for lat in Lattice::ALL {
            let (dst, offset) = rotated_lattice(lat);
            let map = |w: &GradientField| {
                if offset {
                    rotate_field_offset(w)
                } else {
                    rotate_field_aligned(w)
                }
            };
            // Adjoint direction: L*_{s'} (T w) = T_stag (L*_s w).
            let w = rand_field(n, &mut rng);
            let lhs = align_adjoint(&map(&w), dst);
            let rhs = rotate_field_staggered(&align_adjoint(&w, lat));
            let gap = lhs.sub(&rhs).norm();
            assert!(
                gap <= 1e-12,
                "adjoint commutation for {} at n={n}: {gap:.3e} > 1e-12",
                lat.name()
            );
            // Forward direction: L_{s'} (T_stag h) = T (L_s h).
            let h = rand_field(n, &mut rng);
            let lhs_f = align(&rotate_field_staggered(&h), dst);
            let rhs_f = map(&align(&h, lat));
            let gap_f = lhs_f.sub(&rhs_f).norm();
            assert!(
                gap_f <= 1e-12,
                "forward commutation for {} at n={n}: {gap_f:.3e} > 1e-12",
                lat.name()
            );
            checked += 2;
        }
    }
    let secs = check_time(3, t, 5.0);
    pass(
        3,
        "rotation commutation",
        format!("{checked} identities within 1e-12 on bounded random fields in {secs:.2}s"),
    );
}

// ---------------------------------------------------------------------------
// 4: Fourier/rotation norm identity ‖Fw‖ = ‖R(Fw)‖ = ‖F(Rw)‖.
// ---------------------------------------------------------------------------
#[test]
fn criterion_04_fourier_rotation_norms() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst: f64 = 0.0;
    for n in [8usize, 64, 250] {
        let dft = Dft2::new(n);
        let w = rand_cimage(n, &mut rng);
        let fw = dft.forward_c(&w);
        let n0 = c_norm_sq(&fw).sqrt();
        let n1 = c_norm_sq(&kspace_rot90(&fw)).sqrt();
        let n2 = c_norm_sq(&dft.forward_c(&rotate90(&w))).sqrt();
        let rel = ((n1 - n0).abs() / n0).max((n2 - n0).abs() / n0);
        worst = worst.max(rel);
        assert!(
            rel <= 1e-12,
            "norm identity at n={n}: relative deviation {rel:.3e} > 1e-12"
        );
    }
    let secs = check_time(4, t, 10.0);
    pass(
        4,
        "Fourier-rotation norms",
        format!("worst relative deviation {worst:.2e} over n ∈ {{8, 64, 250}} in {secs:.2}s"),
    );
}

// ---------------------------------------------------------------------------
// 5: the rotation-robust functional is quarter-turn invariant on the
//    phantom while plain TV is not.
// ---------------------------------------------------------------------------
#[test]
fn criterion_05_ritv_rotation_invariance() {
    let t = Instant::now();
    let n = 250;
    let u = shepp_logan(n).unwrap();
    let ur = rotate90(&u);

    // Anisotropy witness: plain forward-difference TV shifts by ~5.7e-4
    // under a quarter turn of this render — a genuine, measurable drift
    // twelve orders of magnitude above the invariant functional's gap.
    // Floor at 2e-4 so the witness stays robust to render tweaks.
    let tv_u = tv_value(&u);
    let tv_r = tv_value(&ur);
    let tv_gap = (tv_r - tv_u).abs() / tv_u;
    assert!(
        tv_gap > 2e-4,
        "TV gap {tv_gap:.3e} is not > 2e-4; the witness lost its teeth"
    );

    let params = RitvParams::default();
    let r1 = ritv_value(&u, &params, None).unwrap();

    // Cold start on the rotated image.
    let r2_cold = ritv_value(&ur, &params, None).unwrap();
    let cold_gap = (r2_cold.value - r1.value).abs() / r1.value;
    assert!(
        cold_gap <= 1e-4,
        "cold-start invariance gap {cold_gap:.3e} > 1e-4 (values {} vs {})",
        r1.value,
        r2_cold.value
    );

    // Mapped initialization: the transported decomposition must already be
    // feasible for the rotated image, so no iterations are needed and the
    // value carries over to near machine precision.
    let mapped = r1.state.quarter_turn();
    let warm_params = RitvParams {
        stop_residual: Some(r1.residual * 1.01),
        ..RitvParams::default()
    };
    let r2_warm = ritv_value(&ur, &warm_params, Some(&mapped)).unwrap();
    let warm_gap = (r2_warm.value - r1.value).abs() / r1.value;
    assert!(
        warm_gap <= 1e-8,
        "mapped-init invariance gap {warm_gap:.3e} > 1e-8 ({} iterations run)",
        r2_warm.iters_run
    );

    let secs = check_time(5, t, 120.0);
    pass(
        5,
        "rotation-invariant functional",
        format!(
            "mapped gap {warm_gap:.1e} ≤ 1e-8, cold gap {cold_gap:.1e} ≤ 1e-4, TV gap {tv_gap:.2e} > 2e-4, in {secs:.0}s"
        ),
    );
}

// ---------------------------------------------------------------------------
// 6: frame identity Ψ(Φ z) = z on random images.
// ---------------------------------------------------------------------------
#[test]
fn criterion_06_frame_identity() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst: f64 = 0.0;
    for n in [16usize, 32] {
        let z = rand_image(n, &mut rng);
        let cb = Codebook::build(&z, &FrameParams::default()).unwrap();
        let back = cb.synthesize(&cb.analyze(&z));
        let sup = back
            .iter()
            .zip(z.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(sup);
        assert!(sup <= 1e-9, "‖ΨΦz − z‖∞ = {sup:.3e} > 1e-9 at n={n}");
    }
    let secs = check_time(6, t, 30.0);
    pass(
        6,
        "frame identity",
        format!("sup-norm defect ≤ {worst:.2e} on random images, n ∈ {{16, 32}}, in {secs:.2}s"),
    );
}

// ---------------------------------------------------------------------------
// 7: proximal maps match brute-force grid minimizers of their objectives.
// ---------------------------------------------------------------------------
#[test]
fn criterion_07_prox_grid_oracles() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);

    // Coarse-to-fine 2-D grid minimizer of α‖w‖₂ + ½‖w − v‖².
    let grid_min_group = |v: [f64; 2], alpha: f64| -> [f64; 2] {
        let span = v[0].hypot(v[1]) + alpha + 0.5;
        let (mut best, mut c, mut half) = ([0.0, 0.0], [0.0, 0.0], span);
        let mut best_val = f64::INFINITY;
        for _ in 0..3 {
            let steps = 160;
            for a in 0..=steps {
                for b in 0..=steps {
                    let w = [
                        c[0] - half + 2.0 * half * a as f64 / steps as f64,
                        c[1] - half + 2.0 * half * b as f64 / steps as f64,
                    ];
                    let val = alpha * w[0].hypot(w[1])
                        + 0.5 * ((w[0] - v[0]).powi(2) + (w[1] - v[1]).powi(2));
                    if val < best_val {
                        best_val = val;
                        best = w;
                    }
                }
            }
            c = best;
            half = 3.0 * (2.0 * half / 160.0);
        }
        best
    };

    for _ in 0..100 {
        let v = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let alpha = rng.gen_range(0.0..1.5);
        let mut f = GradientField::zeros(1);
        f.v1[[0, 0]] = v[0];
        f.v2[[0, 0]] = v[1];
        let got = prox_group_soft(&f, alpha);
        let want = grid_min_group(v, alpha);
        assert!(
            (got.v1[[0, 0]] - want[0]).abs() <= 1e-3 && (got.v2[[0, 0]] - want[1]).abs() <= 1e-3,
            "group shrinkage ({}, {}) vs grid ({}, {}) at v=({}, {}), α={alpha}",
            got.v1[[0, 0]],
            got.v2[[0, 0]],
            want[0],
            want[1],
            v[0],
            v[1]
        );
    }

    // Coarse-to-fine 1-D minimizer of σ(½y² + y·b) + ½(y − x)², applied to
    // the real and imaginary axes of the separable complex objective.
    let grid_min_axis = |x: f64, b: f64, sigma: f64| -> f64 {
        let span = x.abs() + b.abs() * sigma + 1.0;
        let (mut best, mut c, mut half) = (0.0, 0.0, span);
        let mut best_val = f64::INFINITY;
        for _ in 0..3 {
            let steps = 2000;
            for k in 0..=steps {
                let y = c - half + 2.0 * half * k as f64 / steps as f64;
                let val = sigma * (0.5 * y * y + y * b) + 0.5 * (y - x) * (y - x);
                if val < best_val {
                    best_val = val;
                    best = y;
                }
            }
            c = best;
            half = 3.0 * (2.0 * half / 2000.0);
        }
        best
    };

    for _ in 0..100 {
        let x = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let sigma = rng.gen_range(0.0..3.0);
        let xs = ComplexImage::from_elem((1, 1), x);
        let bs = ComplexImage::from_elem((1, 1), b);
        let got = prox_conjugate_quadratic(&xs, &bs, sigma)[[0, 0]];
        let want_re = grid_min_axis(x.re, b.re, sigma);
        let want_im = grid_min_axis(x.im, b.im, sigma);
        assert!(
            (got.re - want_re).abs() <= 1e-3 && (got.im - want_im).abs() <= 1e-3,
            "dual quadratic prox {got} vs grid ({want_re}, {want_im}) at x={x}, b={b}, σ={sigma}"
        );
    }

    let secs = check_time(7, t, 10.0);
    pass(
        7,
        "prox grid oracles",
        format!("200 random instances within 1e-3 of grid minimizers in {secs:.2}s"),
    );
}

// ---------------------------------------------------------------------------
// 8: 12-spoke phantom benchmark — the primal-dual solver beats the ADMM
//    baseline across its penalty ladder by at least 6 dB (8 dB nominal).
// ---------------------------------------------------------------------------
#[test]
fn criterion_08_benchmark_gap() {
    let t = Instant::now();
    let n = 128;
    let u0 = shepp_logan(n).unwrap();
    let mask = radial_mask(n, 12).unwrap();
    let b = simulate_kspace(&u0, &mask, 0.0, 4);

    let mp_cfg = MPConfig {
        eta: BENCH_ETA,
        lambda: BENCH_LAMBDA,
        beta: BENCH_BETA,
        max_iters: 300,
        rel_change_tol: None,
        ..MPConfig::default()
    };
    let mp = mp_variant(&b, &mask, &mp_cfg, MPMode::Full, Some(&u0)).unwrap();
    let mp_snr = mp.log.last().unwrap().snr;

    let mut best_gadmm = f64::NEG_INFINITY;
    let mut gadmm_snrs = Vec::new();
    for mu in [1e2, 1e4, 1e6] {
        let cfg = GADMMConfig {
            mu,
            eta: BENCH_ETA,
            lambda: BENCH_LAMBDA,
            max_iters: 300,
            ..GADMMConfig::default()
        };
        let res = gadmm(&b, &mask, &cfg, Some(&u0)).unwrap();
        let s = res.log.last().unwrap().snr;
        gadmm_snrs.push(format!("μ=1e{:.0}: {s:.2}", mu.log10()));
        best_gadmm = best_gadmm.max(s);
    }

    let gap = mp_snr - best_gadmm;
    assert!(
        gap >= 6.0,
        "SNR gap {gap:.2} dB < 6 dB (primal-dual {mp_snr:.2} vs best ADMM {best_gadmm:.2})"
    );
    let secs = check_time(8, t, 240.0);
    let nominal = if gap >= 8.0 { "meets" } else { "below" };
    pass(
        8,
        "phantom benchmark gap",
        format!(
            "gap {gap:.2} dB ≥ 6 dB required ({nominal} the 8 dB nominal goal); primal-dual {mp_snr:.2} dB vs ADMM [{}] after 300 iterations in {secs:.0}s",
            gadmm_snrs.join(", ")
        ),
    );
}

// ---------------------------------------------------------------------------
// 9: quarter-turn equivariance of the structure-only reconstruction on a
//    90°-symmetric mask: reconstructing the rotated scene yields the
//    rotated reconstruction, with matching objectives.
// ---------------------------------------------------------------------------
#[test]
fn criterion_09_rotated_acquisition_equivariance() {
    let t = Instant::now();
    let n = 128;
    let u0 = shepp_logan(n).unwrap();
    let mask = symmetrize90(&radial_mask(n, 12).unwrap());

    let cfg = MPConfig {
        eta: 0.0,
        lambda: BENCH_LAMBDA,
        beta: 1.7e-5,
        max_iters: 2000,
        rel_change_tol: None,
        ..MPConfig::default()
    };

    let b_up = simulate_kspace(&u0, &mask, 0.0, 4);
    let up = mp_variant(&b_up, &mask, &cfg, MPMode::RitvOnly, None).unwrap();

    let u0_rot = rotate90(&u0);
    let b_rot = simulate_kspace(&u0_rot, &mask, 0.0, 4);
    let rot = mp_variant(&b_rot, &mask, &cfg, MPMode::RitvOnly, None).unwrap();

    let mut diff = rotate90(&up.u);
    diff -= &rot.u;
    let deficit = image_norm(&diff) / image_norm(&up.u);
    assert!(
        deficit <= 1e-4,
        "equivariance deficit ‖R(u) − u_rot‖/‖u‖ = {deficit:.3e} > 1e-4"
    );

    let obj = |log: &csmri_solvers::IterRecord| log.data_term + cfg.lambda * log.l12_term;
    let o_up = obj(up.log.last().unwrap());
    let o_rot = obj(rot.log.last().unwrap());
    let obj_gap = (o_up - o_rot).abs() / o_up.abs().max(f64::MIN_POSITIVE);
    assert!(
        obj_gap <= 1e-6,
        "objective mismatch {obj_gap:.3e} > 1e-6 ({o_up} vs {o_rot})"
    );

    let secs = check_time(9, t, 600.0);
    pass(
        9,
        "rotated-acquisition equivariance",
        format!(
            "deficit {deficit:.2e} ≤ 1e-4, objective gap {obj_gap:.2e} ≤ 1e-6 after 2000 iterations in {secs:.0}s"
        ),
    );
}

// ---------------------------------------------------------------------------
// 10: no stagnation — the full model holds its peak SNR over 100
//     iterations while the frame-only variant decays from its peak.
// ---------------------------------------------------------------------------
#[test]
fn criterion_10_no_stagnation() {
    let t = Instant::now();
    let n = 128;
    let u0 = shepp_logan(n).unwrap();
    let mask = radial_mask(n, 12).unwrap();
    let b = simulate_kspace(&u0, &mask, 0.0, 4);

    let drop_of = |mode: MPMode| {
        let cfg = MPConfig {
            eta: BENCH_ETA,
            lambda: BENCH_LAMBDA,
            beta: BENCH_BETA,
            max_iters: 100,
            rel_change_tol: None,
            ..MPConfig::default()
        };
        let res = mp_variant(&b, &mask, &cfg, mode, Some(&u0)).unwrap();
        let max = res.log.iter().map(|r| r.snr).fold(f64::NEG_INFINITY, f64::max);
        let last = res.log.last().unwrap().snr;
        max - last
    };

    let full_drop = drop_of(MPMode::Full);
    let frame_only_drop = drop_of(MPMode::Bm3dOnly);
    assert!(
        full_drop <= 0.2,
        "full-model SNR drop {full_drop:.3} dB > 0.2 dB"
    );
    assert!(
        frame_only_drop > full_drop,
        "frame-only drop {frame_only_drop:.3} dB does not exceed the full model's {full_drop:.3} dB"
    );
    let secs = check_time(10, t, 300.0);
    pass(
        10,
        "no stagnation",
        format!(
            "full drop {full_drop:.3} dB ≤ 0.2 dB; frame-only drop {frame_only_drop:.3} dB exceeds it; {secs:.0}s"
        ),
    );
}

// ---------------------------------------------------------------------------
// 11: linesearch contract — audit a full run's log for acceptance
//     inequality violations and mis-shrunk retries.
// ---------------------------------------------------------------------------
#[test]
fn criterion_11_linesearch_audit() {
    let t = Instant::now();
    let n = 64;
    let u0 = shepp_logan(n).unwrap();
    let mask = radial_mask(n, 12).unwrap();
    let b = simulate_kspace(&u0, &mask, 0.0, 4);
    let cfg = MPConfig {
        eta: BENCH_ETA,
        lambda: BENCH_LAMBDA,
        beta: BENCH_BETA,
        max_iters: 150,
        rel_change_tol: None,
        ..MPConfig::default()
    };
    let res = mp_variant(&b, &mask, &cfg, MPMode::Full, Some(&u0)).unwrap();
    let audit = audit_linesearch(&res.log, cfg.mu);
    assert!(
        audit.is_clean(),
        "linesearch audit found violations:\n{}",
        audit.violations.join("\n")
    );
    assert_eq!(audit.accepted, 150, "every iteration must record an accepted step");
    let secs = check_time(11, t, 60.0);
    pass(
        11,
        "linesearch audit",
        format!(
            "{} accepted steps, {} rejected trials, zero violations in {secs:.0}s",
            audit.accepted, audit.rejections
        ),
    );
}

// ---------------------------------------------------------------------------
// 12: metric identity cases hold exactly.
// ---------------------------------------------------------------------------
#[test]
fn criterion_12_metric_identities() {
    let t = Instant::now();
    let u0 = shepp_logan(64).unwrap();

    assert_eq!(snr(&u0, &u0).unwrap(), f64::INFINITY, "snr(u, u) must be +∞");
    assert_eq!(
        snr_capped(&u0, &u0).unwrap(),
        SNR_CAP_DB,
        "capped snr(u, u) must equal the sentinel"
    );
    assert_eq!(ssim(&u0, &u0).unwrap(), 1.0, "ssim(u, u) must be exactly 1");
    assert_eq!(hfen(&u0, &u0).unwrap(), 0.0, "hfen(u, u) must be exactly 0");

    // Doubling the image makes the error equal the signal: exactly 0 dB.
    let doubled = u0.mapv(|x| 2.0 * x);
    assert_eq!(
        snr(&doubled, &u0).unwrap(),
        0.0,
        "snr(2u, u) must be exactly 0 dB"
    );
    // And any genuine perturbation must be visible to all three metrics.
    let mut bumped = u0.clone();
    bumped[[32, 32]] += 0.5;
    assert!(snr(&bumped, &u0).unwrap().is_finite());
    assert!(ssim(&bumped, &u0).unwrap() < 1.0);
    assert!(hfen(&bumped, &u0).unwrap() > 0.0);

    let secs = check_time(12, t, 10.0);
    pass(
        12,
        "metric identities",
        format!("identity triple and derived cases exact in {secs:.2}s"),
    );
}
