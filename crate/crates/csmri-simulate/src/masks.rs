//! Undersampling mask generators in the DC-at-`(0,0)` frequency layout.
//!
//! All generators guarantee the DC sample and are deterministic: the
//! cartesian pattern is a pure function of `(n, rate, seed)`, the radial
//! and spiral patterns of their geometric parameters alone.
//!
//! Signed frequencies `f ∈ {-(n/2), …, n/2}` map to array indices by
//! `idx = f mod n` (so negative frequencies wrap to the top end), matching
//! the unitary DFT convention of the operators crate.
//!
//! `symmetrize90` closes a mask under the *frequency-grid* quarter turn
//! `kspace_rot90` (the map under which spectra of rotated images transform
//! exactly), so a symmetrized mask samples a rotated image at exactly the
//! frequencies corresponding to the original samples.

use csmri_core::{Error, Mask, Result};
use csmri_operators::kspace_rot90;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Wrap a signed frequency into an array index.
fn freq_to_index(f: i64, n: usize) -> usize {
    (f.rem_euclid(n as i64)) as usize
}

/// Variable-density cartesian mask: `round(rate · n)` full-width
/// phase-encode rows, the DC row always included, the rest drawn without
/// replacement with probability `∝ (1 − |f| / (f_max + 1))⁴ + 0.01`.
pub fn cartesian_mask(n: usize, rate: f64, seed: u64) -> Result<Mask> {
    if n == 0 {
        return Err(Error::invalid_parameter("n", "must be positive"));
    }
    if !(0.0 < rate && rate <= 1.0) {
        return Err(Error::invalid_parameter("rate", "must lie in (0, 1]"));
    }
    let rows_wanted = ((rate * n as f64).round() as usize).clamp(1, n);

    // Signed row frequency (DC at 0, Nyquist kept positive for even n)
    // and density weight per row index.
    let f_of = |r: usize| -> i64 {
        let (r, n) = (r as i64, n as i64);
        if 2 * r <= n {
            r
        } else {
            r - n
        }
    };
    let f_max = (0..n).map(|r| f_of(r).abs()).max().unwrap() as f64;
    let weight = |r: usize| -> f64 {
        let f = f_of(r).abs() as f64;
        (1.0 - f / (f_max + 1.0)).powi(4) + 0.01
    };

    let mut chosen = vec![false; n];
    chosen[0] = true; // DC row
    let mut remaining: Vec<usize> = (1..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 1..rows_wanted {
        let total: f64 = remaining.iter().map(|&r| weight(r)).sum();
        let mut pick = rng.gen_range(0.0..total);
        let mut take = remaining.len() - 1;
        for (k, &r) in remaining.iter().enumerate() {
            pick -= weight(r);
            if pick <= 0.0 {
                take = k;
                break;
            }
        }
        chosen[remaining.swap_remove(take)] = true;
    }

    let mut m = Mask::from_elem((n, n), false);
    for r in 0..n {
        if chosen[r] {
            m.row_mut(r).fill(true);
        }
    }
    Ok(m)
}

/// Pseudo-radial mask: `spokes` full lines through DC at angles
/// `θ_j = jπ/spokes`, marched in half-pixel steps through signed-frequency
/// space and rounded to the nearest grid cell.
pub fn radial_mask(n: usize, spokes: usize) -> Result<Mask> {
    if n == 0 {
        return Err(Error::invalid_parameter("n", "must be positive"));
    }
    if spokes == 0 {
        return Err(Error::invalid_parameter("spokes", "must be positive"));
    }
    let mut m = Mask::from_elem((n, n), false);
    m[[0, 0]] = true;
    let half = n as f64 / 2.0;
    for j in 0..spokes {
        let theta = j as f64 * std::f64::consts::PI / spokes as f64;
        let (s, c) = theta.sin_cos();
        let mut t = 0.0;
        loop {
            let fr = t * s;
            let fc = t * c;
            if fr.abs() > half || fc.abs() > half {
                break;
            }
            for (a, b) in [(fr, fc), (-fr, -fc)] {
                let p = freq_to_index(a.round() as i64, n);
                let q = freq_to_index(b.round() as i64, n);
                m[[p, q]] = true;
            }
            t += 0.5;
        }
    }
    Ok(m)
}

/// Archimedean spiral mask `r = c·θ`, rasterized in quarter-pixel arc
/// steps.  The number of turns is found by doubling until the target rate
/// is reachable and then bisected, so the achieved rate lands within a few
/// cells of `round(rate · n²)`.  Rates beyond what the spiral can cover
/// produce [`Error::UnreachableRate`].
pub fn spiral_mask(n: usize, rate: f64) -> Result<Mask> {
    if n == 0 {
        return Err(Error::invalid_parameter("n", "must be positive"));
    }
    if !(0.0 < rate && rate <= 1.0) {
        return Err(Error::invalid_parameter("rate", "must lie in (0, 1]"));
    }
    let target = ((rate * (n * n) as f64).round() as usize).max(1);

    let render = |turns: f64| -> Mask {
        let mut m = Mask::from_elem((n, n), false);
        m[[0, 0]] = true;
        let r_max = n as f64 / std::f64::consts::SQRT_2;
        let theta_max = turns * 2.0 * std::f64::consts::PI;
        let c = (n as f64 / 2.0) / theta_max; // reaches the edge on the last turn
        let mut theta = 0.0;
        while theta <= theta_max {
            let r = c * theta;
            if r > r_max {
                break;
            }
            let fr = r * theta.sin();
            let fc = r * theta.cos();
            if fr.abs() <= n as f64 / 2.0 && fc.abs() <= n as f64 / 2.0 {
                let p = freq_to_index(fr.round() as i64, n);
                let q = freq_to_index(fc.round() as i64, n);
                m[[p, q]] = true;
            }
            // Quarter-pixel arc-length steps.
            theta += 0.25 / r.max(c).max(0.25);
        }
        m
    };
    let count = |m: &Mask| m.iter().filter(|&&x| x).count();

    let mut hi = 1.0f64;
    let cap = 4096.0;
    while count(&render(hi)) < target {
        hi *= 2.0;
        if hi > cap {
            return Err(Error::UnreachableRate {
                kind: "spiral".into(),
                requested: rate,
                n,
            });
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if count(&render(mid)) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(render(hi))
}

/// Close a mask under the frequency-grid quarter turn:
/// `M ∨ R M ∨ R² M ∨ R³ M`.
pub fn symmetrize90(m: &Mask) -> Mask {
    let r1 = kspace_rot90(m);
    let r2 = kspace_rot90(&r1);
    let r3 = kspace_rot90(&r2);
    Mask::from_shape_fn(m.dim(), |idx| m[idx] || r1[idx] || r2[idx] || r3[idx])
}

/// Fraction of sampled frequencies.
pub fn achieved_rate(m: &Mask) -> f64 {
    m.iter().filter(|&&x| x).count() as f64 / m.len() as f64
}

/// Declarative mask description (the CLI's configuration target).
#[derive(Debug, Clone, PartialEq)]
pub enum MaskSpec {
    Cartesian { rate: f64, seed: u64 },
    Radial { spokes: usize },
    Spiral { rate: f64 },
}

/// Build a mask from its description, optionally closing it under the
/// frequency-grid quarter turn.
pub fn make_mask(spec: &MaskSpec, n: usize, symmetrize: bool) -> Result<Mask> {
    let m = match spec {
        MaskSpec::Cartesian { rate, seed } => cartesian_mask(n, *rate, *seed)?,
        MaskSpec::Radial { spokes } => radial_mask(n, *spokes)?,
        MaskSpec::Spiral { rate } => spiral_mask(n, *rate)?,
    };
    Ok(if symmetrize { symmetrize90(&m) } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_rate_accounting_and_dc() {
        for (n, rate, seed) in [(64usize, 0.3, 1u64), (128, 0.25, 2), (101, 0.4, 3)] {
            let m = cartesian_mask(n, rate, seed).unwrap();
            assert!(m[[0, 0]], "DC missing");
            // Rows are full width.
            for r in 0..n {
                let row = m.row(r);
                let c = row.iter().filter(|&&x| x).count();
                assert!(c == 0 || c == n, "row {r} partially sampled");
            }
            let achieved = achieved_rate(&m);
            assert!(
                (achieved - rate).abs() <= 2.0 / n as f64,
                "n={n}: rate {achieved} vs {rate}"
            );
        }
    }

    #[test]
    fn cartesian_is_seed_deterministic_and_center_heavy() {
        let a = cartesian_mask(96, 0.3, 7).unwrap();
        let b = cartesian_mask(96, 0.3, 7).unwrap();
        assert_eq!(a, b);
        let c = cartesian_mask(96, 0.3, 8).unwrap();
        assert_ne!(a, c, "different seeds should differ");
        // Low frequencies should be sampled denser than high ones on
        // average: compare the band |f| < n/8 to the band |f| > 3n/8.
        let n = 256;
        let mut low = 0;
        let mut high = 0;
        for seed in 0..20 {
            let m = cartesian_mask(n, 0.25, seed).unwrap();
            for r in 0..n {
                let f = if r <= n / 2 { r as i64 } else { r as i64 - n as i64 };
                if m[[r, 0]] {
                    if f.unsigned_abs() < (n / 8) as u64 {
                        low += 1;
                    } else if f.unsigned_abs() > (3 * n / 8) as u64 {
                        high += 1;
                    }
                }
            }
        }
        assert!(low > 3 * high, "density profile looks flat: {low} vs {high}");
    }

    #[test]
    fn radial_spokes_hit_dc_and_axes() {
        let n = 64;
        let m = radial_mask(n, 4).unwrap();
        assert!(m[[0, 0]]);
        // The 0° spoke covers the full DC row, the 90° spoke the column.
        for k in 0..n {
            assert!(m[[0, k]], "row spoke missing column {k}");
            assert!(m[[k, 0]], "column spoke missing row {k}");
        }
        let rate = achieved_rate(&m);
        assert!(rate < 0.2, "4 spokes should be sparse, got {rate}");
    }

    #[test]
    fn symmetrized_masks_are_rotation_fixed_points() {
        for base in [
            radial_mask(65, 5).unwrap(),
            cartesian_mask(64, 0.3, 11).unwrap(),
            spiral_mask(48, 0.2).unwrap(),
        ] {
            let m = symmetrize90(&base);
            assert_eq!(m, kspace_rot90(&m), "not a fixed point");
            // Closure only ever adds samples.
            for (a, b) in base.iter().zip(m.iter()) {
                assert!(*b || !*a);
            }
        }
    }

    #[test]
    fn spiral_hits_requested_rate_or_errors() {
        let n = 64;
        for rate in [0.15, 0.3] {
            let m = spiral_mask(n, rate).unwrap();
            assert!(m[[0, 0]]);
            let achieved = achieved_rate(&m);
            assert!(
                (achieved - rate).abs() < 0.02,
                "requested {rate}, achieved {achieved}"
            );
        }
        match spiral_mask(n, 0.99) {
            Err(Error::UnreachableRate { .. }) => {}
            other => panic!("expected UnreachableRate, got {other:?}"),
        }
    }
}
