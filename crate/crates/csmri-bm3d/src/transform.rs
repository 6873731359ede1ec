//! Orthonormal building blocks of the group transform: a 2-D DCT-II on
//! patches and a full dyadic Haar decomposition along the group dimension.
//!
//! Both transforms are exactly orthonormal, so the composed group transform
//! is an isometry and analysis followed by synthesis is the identity to
//! machine precision.

use ndarray::Array2;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Orthonormal DCT-II matrix of size `n x n`:
/// `C[k][i] = s_k · cos(π (2i+1) k / (2n))` with `s_0 = sqrt(1/n)`,
/// `s_k = sqrt(2/n)` for `k > 0`; rows are orthonormal.
pub fn dct_matrix(n: usize) -> Array2<f64> {
    let mut c = Array2::zeros((n, n));
    for k in 0..n {
        let s = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for i in 0..n {
            c[[k, i]] = s * (PI * (2 * i + 1) as f64 * k as f64 / (2.0 * n as f64)).cos();
        }
    }
    c
}

/// 2-D patch transform `C · X · Cᵀ` (rows and columns independently).
pub fn dct2_forward(c: &Array2<f64>, x: &Array2<f64>) -> Array2<f64> {
    let p = c.nrows();
    let mut tmp = vec![0.0; p * p];
    let mut out = vec![0.0; p * p];
    dct2_forward_slice(
        c.as_slice().unwrap(),
        x.as_slice().unwrap(),
        &mut tmp,
        &mut out,
        p,
    );
    Array2::from_shape_vec((p, p), out).unwrap()
}

/// Inverse 2-D patch transform `Cᵀ · Y · C`.
pub fn dct2_inverse(c: &Array2<f64>, y: &Array2<f64>) -> Array2<f64> {
    let p = c.nrows();
    let mut tmp = vec![0.0; p * p];
    let mut out = vec![0.0; p * p];
    dct2_inverse_slice(
        c.as_slice().unwrap(),
        y.as_slice().unwrap(),
        &mut tmp,
        &mut out,
        p,
    );
    Array2::from_shape_vec((p, p), out).unwrap()
}

/// Allocation-free `out = C · X · Cᵀ` on row-major `p x p` slices; `tmp`
/// holds the intermediate product. Buffers may be reused across calls.
pub fn dct2_forward_slice(c: &[f64], x: &[f64], tmp: &mut [f64], out: &mut [f64], p: usize) {
    // tmp = C · X  (tmp[k][j] = Σ_i C[k][i] X[i][j])
    tmp[..p * p].fill(0.0);
    for k in 0..p {
        let crow = &c[k * p..(k + 1) * p];
        let trow = &mut tmp[k * p..(k + 1) * p];
        for i in 0..p {
            let w = crow[i];
            let xrow = &x[i * p..(i + 1) * p];
            for j in 0..p {
                trow[j] += w * xrow[j];
            }
        }
    }
    // out = tmp · Cᵀ  (out[k][l] = Σ_j tmp[k][j] C[l][j])
    for k in 0..p {
        let trow = &tmp[k * p..(k + 1) * p];
        let orow = &mut out[k * p..(k + 1) * p];
        for l in 0..p {
            let crow = &c[l * p..(l + 1) * p];
            let mut acc = 0.0;
            for j in 0..p {
                acc += trow[j] * crow[j];
            }
            orow[l] = acc;
        }
    }
}

/// Allocation-free `out = Cᵀ · Y · C` on row-major `p x p` slices.
pub fn dct2_inverse_slice(c: &[f64], y: &[f64], tmp: &mut [f64], out: &mut [f64], p: usize) {
    // tmp = Cᵀ · Y  (tmp[i][j] = Σ_k C[k][i] Y[k][j])
    tmp[..p * p].fill(0.0);
    for k in 0..p {
        let crow = &c[k * p..(k + 1) * p];
        let yrow = &y[k * p..(k + 1) * p];
        for i in 0..p {
            let w = crow[i];
            let trow = &mut tmp[i * p..(i + 1) * p];
            for j in 0..p {
                trow[j] += w * yrow[j];
            }
        }
    }
    // out = tmp · C  (out[i][l] = Σ_j tmp[i][j] C[j][l])
    out[..p * p].fill(0.0);
    for i in 0..p {
        let trow = &tmp[i * p..(i + 1) * p];
        let orow = &mut out[i * p..(i + 1) * p];
        for j in 0..p {
            let w = trow[j];
            let crow = &c[j * p..(j + 1) * p];
            for l in 0..p {
                orow[l] += w * crow[l];
            }
        }
    }
}

/// Full orthonormal Haar decomposition in place (`x.len()` a power of two,
/// approximation coefficients packed at the front; `x[0]` ends up as
/// `mean · sqrt(len)`).
pub fn haar_forward(x: &mut [f64]) {
    let m = x.len();
    debug_assert!(m.is_power_of_two(), "group length must be a power of two");
    let mut tmp = vec![0.0; m];
    let mut len = m;
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            let a = x[2 * i];
            let b = x[2 * i + 1];
            tmp[i] = (a + b) * FRAC_1_SQRT_2;
            tmp[half + i] = (a - b) * FRAC_1_SQRT_2;
        }
        x[..len].copy_from_slice(&tmp[..len]);
        len = half;
    }
}

/// Inverse of [`haar_forward`], in place.
pub fn haar_inverse(x: &mut [f64]) {
    let m = x.len();
    debug_assert!(m.is_power_of_two(), "group length must be a power of two");
    let mut tmp = vec![0.0; m];
    let mut len = 2;
    while len <= m {
        let half = len / 2;
        for i in 0..half {
            let s = x[i];
            let d = x[half + i];
            tmp[2 * i] = (s + d) * FRAC_1_SQRT_2;
            tmp[2 * i + 1] = (s - d) * FRAC_1_SQRT_2;
        }
        x[..len].copy_from_slice(&tmp[..len]);
        len *= 2;
    }
}
