//! Complex white Gaussian measurement noise.
//!
//! Noise is added only at *sampled* frequencies (unsampled entries stay
//! exactly zero, as the measurement never saw them):
//! `b ← b + σ (z₁ + i z₂)` with independent standard normal `z₁, z₂` per
//! sample.  Normals are produced by the Box–Muller transform over a seeded
//! counter-based generator, so a given `(seed, mask)` pair yields
//! bit-identical noise across runs and platforms; samples are drawn in
//! row-major mask order.

use csmri_core::{ComplexImage, Mask};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One standard normal pair via Box–Muller.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    // u1 ∈ (0, 1] so the logarithm is finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    (r * c, r * s)
}

/// Add `σ (z₁ + i z₂)` at every sampled location, in place.
pub fn add_complex_noise(b: &mut ComplexImage, mask: &Mask, sigma: f64, seed: u64) {
    assert_eq!(b.dim(), mask.dim(), "measurement/mask shape mismatch");
    assert!(sigma >= 0.0, "noise level must be non-negative");
    if sigma == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (z, &m) in b.iter_mut().zip(mask.iter()) {
        if m {
            let (z1, z2) = normal_pair(&mut rng);
            *z += Complex64::new(sigma * z1, sigma * z2);
        }
    }
}
