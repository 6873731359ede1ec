//! Reconstruction quality metrics.
//!
//! Three scalar scores compare a reconstruction `u` against a reference
//! `u0` on the same square grid:
//!
//! * [`snr`] — signal-to-noise ratio in decibels,
//!   `10·log10(‖u0‖² / ‖u − u0‖²)`.  Identical inputs give `+∞`; use
//!   [`snr_capped`] when a finite number is needed for tabulation.
//! * [`ssim`] — mean structural similarity over an 11×11 Gaussian window
//!   (σ = 1.5) with the standard stabilisation constants for a unit
//!   dynamic range, averaged over window positions that lie fully inside
//!   the image.
//! * [`hfen`] — high-frequency error norm: both images are filtered with
//!   a 15×15 Laplacian-of-Gaussian kernel (σ = 1.5, zero-mean) under
//!   mirror boundary handling, and the relative ℓ2 difference of the
//!   filtered images is returned.

use csmri_core::{Error, RealImage, Result};
use ndarray::Array2;

/// Finite stand-in for an infinite SNR when writing tables or logs.
pub const SNR_CAP_DB: f64 = 300.0;

/// Signal-to-noise ratio of `u` against the reference `u0`, in dB.
///
/// Returns `+∞` when `u == u0` exactly and `-∞` when the reference is
/// identically zero while `u` is not.
pub fn snr(u: &RealImage, u0: &RealImage) -> Result<f64> {
    check_same_shape(u, u0)?;
    let mut signal = 0.0;
    let mut noise = 0.0;
    for (a, b) in u.iter().zip(u0.iter()) {
        signal += b * b;
        let d = a - b;
        noise += d * d;
    }
    Ok(10.0 * (signal / noise).log10())
}

/// [`snr`] clamped to at most [`SNR_CAP_DB`], so identical inputs report
/// a finite sentinel value instead of `+∞`.
pub fn snr_capped(u: &RealImage, u0: &RealImage) -> Result<f64> {
    Ok(snr(u, u0)?.min(SNR_CAP_DB))
}

/// Half-width of the SSIM window (window size 11).
const SSIM_RADIUS: usize = 5;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = 0.01 * 0.01;
const SSIM_C2: f64 = 0.03 * 0.03;

/// Normalised 1-D Gaussian taps for the separable SSIM window.
fn ssim_window() -> [f64; 2 * SSIM_RADIUS + 1] {
    let mut w = [0.0; 2 * SSIM_RADIUS + 1];
    let mut sum = 0.0;
    for (k, tap) in w.iter_mut().enumerate() {
        let x = k as f64 - SSIM_RADIUS as f64;
        *tap = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *tap;
    }
    for tap in w.iter_mut() {
        *tap /= sum;
    }
    w
}

/// Gaussian-filter `img` with the separable SSIM window, keeping only the
/// fully covered interior: the result has side `n - 2·SSIM_RADIUS`.
fn ssim_blur(img: &RealImage) -> RealImage {
    let n = img.nrows();
    let w = ssim_window();
    let m = n - 2 * SSIM_RADIUS;
    // Rows first: full height, valid width.
    let mut rows = Array2::zeros((n, m));
    for i in 0..n {
        for j in 0..m {
            let mut acc = 0.0;
            for (k, tap) in w.iter().enumerate() {
                acc += tap * img[[i, j + k]];
            }
            rows[[i, j]] = acc;
        }
    }
    let mut out = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            let mut acc = 0.0;
            for (k, tap) in w.iter().enumerate() {
                acc += tap * rows[[i + k, j]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Mean structural similarity between `u` and `u0`.
///
/// Uses an 11×11 Gaussian window (σ = 1.5), stabilisers C1 = 0.01² and
/// C2 = 0.03² for images on a unit intensity scale, and averages the local
/// index over every window position that fits entirely inside the image.
/// Requires the side length to be at least 11.
pub fn ssim(u: &RealImage, u0: &RealImage) -> Result<f64> {
    check_same_shape(u, u0)?;
    let n = u.nrows();
    if n < 2 * SSIM_RADIUS + 1 {
        return Err(Error::invalid_parameter(
            "ssim image size",
            format!("side {n} is smaller than the 11-pixel window"),
        ));
    }
    let mu_x = ssim_blur(u);
    let mu_y = ssim_blur(u0);
    let xx = ssim_blur(&(u * u));
    let yy = ssim_blur(&(u0 * u0));
    let xy = ssim_blur(&(u * u0));

    let m = n - 2 * SSIM_RADIUS;
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mx = mu_x[[i, j]];
            let my = mu_y[[i, j]];
            let var_x = xx[[i, j]] - mx * mx;
            let var_y = yy[[i, j]] - my * my;
            let cov = xy[[i, j]] - mx * my;
            let num = (2.0 * mx * my + SSIM_C1) * (2.0 * cov + SSIM_C2);
            let den = (mx * mx + my * my + SSIM_C1) * (var_x + var_y + SSIM_C2);
            total += num / den;
        }
    }
    Ok(total / (m * m) as f64)
}

/// Half-width of the 15×15 Laplacian-of-Gaussian kernel.
const LOG_RADIUS: usize = 7;
const LOG_SIGMA: f64 = 1.5;

/// 15×15 zero-mean Laplacian-of-Gaussian kernel with σ = 1.5.
///
/// Built the conventional way: a normalised Gaussian `g` on the grid is
/// multiplied pointwise by `(x² + y² − 2σ²)/σ⁴`, and the mean of the
/// result is subtracted so the taps sum to zero — a constant image then
/// filters to exactly zero.
fn log_kernel() -> Array2<f64> {
    let size = 2 * LOG_RADIUS + 1;
    let s2 = LOG_SIGMA * LOG_SIGMA;
    let mut g = Array2::zeros((size, size));
    let mut sum = 0.0;
    for i in 0..size {
        for j in 0..size {
            let y = i as f64 - LOG_RADIUS as f64;
            let x = j as f64 - LOG_RADIUS as f64;
            let v = (-(x * x + y * y) / (2.0 * s2)).exp();
            g[[i, j]] = v;
            sum += v;
        }
    }
    let mut k = Array2::zeros((size, size));
    let mut mean = 0.0;
    for i in 0..size {
        for j in 0..size {
            let y = i as f64 - LOG_RADIUS as f64;
            let x = j as f64 - LOG_RADIUS as f64;
            let v = g[[i, j]] / sum * (x * x + y * y - 2.0 * s2) / (s2 * s2);
            k[[i, j]] = v;
            mean += v;
        }
    }
    mean /= (size * size) as f64;
    k.mapv_inplace(|v| v - mean);
    k
}

/// Mirror an out-of-range index back into `0..n` (edge pixels repeat:
/// -1 maps to 0, n maps to n-1).
fn mirror(idx: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = idx;
    // At most two folds are ever needed for kernel radii below the image
    // size, but loop for safety on tiny images.
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Convolve `img` with the Laplacian-of-Gaussian kernel under mirror
/// boundary handling, same-size output.
fn log_filter(img: &RealImage) -> RealImage {
    let n = img.nrows();
    let k = log_kernel();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for a in 0..2 * LOG_RADIUS + 1 {
                for b in 0..2 * LOG_RADIUS + 1 {
                    let r = mirror(i as isize + a as isize - LOG_RADIUS as isize, n);
                    let c = mirror(j as isize + b as isize - LOG_RADIUS as isize, n);
                    acc += k[[a, b]] * img[[r, c]];
                }
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// High-frequency error norm of `u` against the reference `u0`:
/// `‖LoG(u) − LoG(u0)‖₂ / ‖LoG(u0)‖₂` with a 15×15, σ = 1.5 kernel.
///
/// Identical inputs give exactly 0.
pub fn hfen(u: &RealImage, u0: &RealImage) -> Result<f64> {
    check_same_shape(u, u0)?;
    let fu = log_filter(u);
    let fu0 = log_filter(u0);
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in fu.iter().zip(fu0.iter()) {
        let d = a - b;
        num += d * d;
        den += b * b;
    }
    Ok((num / den).sqrt())
}

/// All three scores for one reconstruction, SNR capped for tabulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub snr_db: f64,
    pub ssim: f64,
    pub hfen: f64,
}

/// Evaluate SNR (capped at [`SNR_CAP_DB`]), SSIM, and HFEN in one call.
pub fn evaluate(u: &RealImage, u0: &RealImage) -> Result<MetricReport> {
    Ok(MetricReport {
        snr_db: snr_capped(u, u0)?,
        ssim: ssim(u, u0)?,
        hfen: hfen(u, u0)?,
    })
}

fn check_same_shape(u: &RealImage, u0: &RealImage) -> Result<()> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    if u0.nrows() != n || u0.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "metric operands",
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", u0.nrows(), u0.ncols()),
        });
    }
    Ok(())
}
