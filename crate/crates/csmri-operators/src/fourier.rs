//! Unitary two-dimensional DFT and the masked frequency-sampling operator.
//!
//! The transform pair is normalised symmetrically: each 2-D pass multiplies
//! by `1/n`, so `F` is unitary (`F* = F^{-1}`), Parseval's identity holds
//! exactly, and the DC coefficient sits at index `(0, 0)`:
//!
//! ```text
//! (F u)[p][q]      = (1/n) Σ_{a,b} u[a][b] · exp(-2πi (pa + qb) / n)
//! (F^{-1} x)[a][b] = (1/n) Σ_{p,q} x[p][q] · exp(+2πi (pa + qb) / n)
//! ```
//!
//! [`SamplingOp`] composes the DFT with a boolean frequency mask `M`:
//! `A u = M ⊙ F u`.  Its adjoint on measurement space is
//! `A* r = Re(F^{-1}(M ⊙ r))` — the real part is the exact adjoint when the
//! image space is the *real* vector space `R^{n x n}` with the standard
//! inner product and measurement space uses `Re <x, y>_C`.

use csmri_core::{ComplexImage, Mask, RealImage};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Unitary 2-D DFT on `n x n` complex arrays (planned once, reused).
pub struct Dft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Dft2 {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "DFT size must be positive");
        let mut planner = FftPlanner::new();
        Dft2 {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place 2-D pass: rows, then columns (via transposes), then scale by `1/n`.
    fn pass(&self, data: &mut ComplexImage, fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        debug_assert_eq!(data.dim(), (n, n));
        {
            let buf = data.as_slice_mut().expect("standard layout");
            fft.process(buf); // all rows at once (contiguous chunks of len n)
        }
        let mut t = transpose(data);
        {
            let buf = t.as_slice_mut().expect("standard layout");
            fft.process(buf);
        }
        *data = transpose(&t);
        let scale = 1.0 / n as f64;
        data.mapv_inplace(|z| z * scale);
    }

    /// Forward transform of a complex image.
    pub fn forward_c(&self, u: &ComplexImage) -> ComplexImage {
        let mut x = u.clone();
        self.pass(&mut x, &self.fwd);
        x
    }

    /// Forward transform of a real image.
    pub fn forward(&self, u: &RealImage) -> ComplexImage {
        let x = u.mapv(|r| Complex64::new(r, 0.0));
        self.forward_c(&x)
    }

    /// Inverse transform (complex output).
    pub fn inverse(&self, x: &ComplexImage) -> ComplexImage {
        let mut u = x.clone();
        self.pass(&mut u, &self.inv);
        u
    }

    /// Inverse transform, keeping the real part only.
    pub fn inverse_real(&self, x: &ComplexImage) -> RealImage {
        self.inverse(x).mapv(|z| z.re)
    }
}

fn transpose(a: &ComplexImage) -> ComplexImage {
    let (r, c) = a.dim();
    ComplexImage::from_shape_fn((c, r), |(i, j)| a[[j, i]])
}

/// Real inner product on complex arrays: `Re Σ a_k · conj(b_k)`.
pub fn re_dot(a: &ComplexImage, b: &ComplexImage) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

/// Squared Frobenius norm of a complex array.
pub fn c_norm_sq(a: &ComplexImage) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Apply a boolean mask to a complex array (zero where the mask is false).
pub fn mask_complex(x: &ComplexImage, mask: &Mask) -> ComplexImage {
    ComplexImage::from_shape_fn(x.dim(), |idx| {
        if mask[idx] {
            x[idx]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Masked frequency-sampling operator `A u = M ⊙ F u` with exact adjoint.
pub struct SamplingOp {
    dft: Dft2,
    mask: Mask,
}

impl SamplingOp {
    pub fn new(mask: Mask) -> Self {
        let n = mask.nrows();
        assert_eq!(n, mask.ncols(), "mask must be square");
        SamplingOp {
            dft: Dft2::new(n),
            mask,
        }
    }

    pub fn n(&self) -> usize {
        self.dft.n()
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn dft(&self) -> &Dft2 {
        &self.dft
    }

    /// Number of sampled frequencies.
    pub fn sample_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// `A u = M ⊙ F u`.
    pub fn forward(&self, u: &RealImage) -> ComplexImage {
        mask_complex(&self.dft.forward(u), &self.mask)
    }

    /// `A* r = Re(F^{-1}(M ⊙ r))`.
    pub fn adjoint(&self, r: &ComplexImage) -> RealImage {
        self.dft.inverse_real(&mask_complex(r, &self.mask))
    }

    /// Zero-filled reconstruction of masked measurements (alias of the
    /// adjoint, which already re-applies the mask defensively).
    pub fn zero_fill(&self, b: &ComplexImage) -> RealImage {
        self.adjoint(b)
    }
}
