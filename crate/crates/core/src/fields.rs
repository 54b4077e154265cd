//! Deterministic field generators for tests, surveys and initial data.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::ComplexField;
use crate::grid::Grid2D;
use crate::spectral::{from_spectral, to_spectral};

/// e^{ik·x} for the lattice wavenumber with integer modes (mx, my).
pub fn plane_wave(grid: Grid2D, mx: i64, my: i64) -> ComplexField {
    let dk = grid.wavenumber_spacing();
    let kx = dk * mx as f64;
    let ky = dk * my as f64;
    ComplexField::from_fn(grid, |x, y| Complex64::from_polar(1.0, kx * x + ky * y))
}

/// Centered Gaussian e^{−|x|²/(2w²)}.
pub fn gaussian(grid: Grid2D, width: f64) -> ComplexField {
    let w2 = width * width;
    ComplexField::from_fn(grid, |x, y| {
        Complex64::new((-(x * x + y * y) / (2.0 * w2)).exp(), 0.0)
    })
}

/// Hermite-type profile Δ²(e^{−|x|²/(2w²)}), evaluated in closed form.
///
/// Its Fourier transform vanishes to fourth order at k = 0, so fractional
/// powers of it keep rapid spatial decay; plain Gaussians do not (their
/// fractional Laplacians develop |x|^{−2−s} tails that reach the box edge).
pub fn gaussian_hermite(grid: Grid2D, width: f64) -> ComplexField {
    let w2 = width * width;
    let w4 = w2 * w2;
    let w6 = w4 * w2;
    ComplexField::from_fn(grid, |x, y| {
        let r2 = x * x + y * y;
        let g = (-r2 / (2.0 * w2)).exp();
        let phi = r2 / w4 - 2.0 / w2;
        Complex64::new((4.0 / w4 - 4.0 * r2 / w6 + phi * phi) * g, 0.0)
    })
}

/// Δ⁴-filtered Gaussian with unit L² norm: spectrum |k|⁸ e^{−w²|k|²/2}.
///
/// Eight vanishing moments push the algebraic tails of its fractional
/// Laplacians to |x|^{−10−s}, far below box-edge significance; this is the
/// verification family for the free-case commutator cancellations.
pub fn moment_cancelled_gaussian(grid: Grid2D, width: f64) -> ComplexField {
    let g = gaussian(grid, width);
    let filtered = crate::spectral::apply_real_symbol(&g, |kx, ky| (kx * kx + ky * ky).powi(4));
    let norm = filtered.norm_l2();
    filtered.scaled(Complex64::new(1.0 / norm, 0.0))
}

/// Random field with iid complex Gaussian spectral coefficients on the modes
/// max(|mx|, |my|) ≤ max_mode and zero outside. Deterministic in `seed`.
pub fn random_band_limited_modes(grid: Grid2D, seed: u64, max_mode: i64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let mut hat = to_spectral(&ComplexField::zeros(grid));
    for iy in 0..n {
        for ix in 0..n {
            let mx = grid.mode(ix);
            let my = grid.mode(iy);
            if mx.abs() <= max_mode && my.abs() <= max_mode {
                // Box-Muller, consuming the stream in fixed lattice order
                let u1: f64 = rng.random::<f64>().max(1e-300);
                let u2: f64 = rng.random::<f64>();
                let r = (-2.0 * u1.ln()).sqrt();
                let theta = 2.0 * std::f64::consts::PI * u2;
                hat.coeffs_mut()[iy * n + ix] = Complex64::from_polar(r, theta);
            }
        }
    }
    let f = from_spectral(&hat);
    let norm = f.norm_l2();
    if norm > 0.0 {
        f.scaled(Complex64::new(1.0 / norm, 0.0))
    } else {
        f
    }
}

/// Band limit expressed as a fraction of the Nyquist mode n/2.
pub fn random_band_limited(grid: Grid2D, seed: u64, fraction: f64) -> ComplexField {
    let max_mode = ((grid.n() as f64 / 2.0) * fraction).floor() as i64;
    random_band_limited_modes(grid, seed, max_mode.max(1))
}

/// A batch of independent survey fields sharing a base seed.
pub fn survey_fields(grid: Grid2D, seed: u64, count: usize, max_mode: i64) -> Vec<ComplexField> {
    (0..count)
        .map(|i| random_band_limited_modes(grid, seed.wrapping_add(i as u64), max_mode))
        .collect()
}

/// Multi-scale mix for the resolvent surveys: Gaussians at dyadic widths,
/// a few plane waves, and seeded band-limited noise. Scaling-sharp estimates
/// need test profiles at every length scale the τ sweep touches.
pub fn survey_mix(grid: Grid2D, seed: u64, noise_count: usize) -> Vec<ComplexField> {
    let mut out = Vec::new();
    let l = grid.half_width();
    let mut w = (1.5 * grid.spacing()).max(l / 32.0);
    while w <= l / 3.0 {
        out.push(gaussian(grid, w));
        w *= 2.0;
    }
    for m in [1i64, 2, 4, 8] {
        if m < grid.n() as i64 / 3 {
            out.push(plane_wave(grid, m, -m / 2));
        }
    }
    out.extend(survey_fields(grid, seed, noise_count, (grid.n() / 6) as i64));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::high_band_energy_fraction;

    #[test]
    fn band_limited_fields_are_band_limited() {
        let g = Grid2D::new(32, 2.0).unwrap();
        let f = random_band_limited_modes(g, 5, 10);
        assert!(high_band_energy_fraction(&f) < 1e-20);
    }

    #[test]
    fn generators_are_deterministic() {
        let g = Grid2D::new(16, 2.0).unwrap();
        let a = random_band_limited_modes(g, 9, 5);
        let b = random_band_limited_modes(g, 9, 5);
        assert!(a.sub(&b).norm_linf() == 0.0);
        let c = random_band_limited_modes(g, 10, 5);
        assert!(a.sub(&c).norm_linf() > 1e-8);
    }

    #[test]
    fn hermite_profile_has_vanishing_moments() {
        let g = Grid2D::new(64, 10.0).unwrap();
        let f = gaussian_hermite(g, 1.0);
        // mean (zeroth moment): integral over the box
        let mean: f64 = f.values().iter().map(|v| v.re).sum::<f64>() * g.cell_area();
        assert!(mean.abs() < 1e-10, "mean {mean}");
        // second moment sum x_i^2 f also vanishes for Δ²g
        let m2: f64 = g
            .nodes()
            .map(|(j, x, y)| (x * x + y * y) * f.values()[j].re)
            .sum::<f64>()
            * g.cell_area();
        assert!(m2.abs() < 1e-9, "second moment {m2}");
    }
}
