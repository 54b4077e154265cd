//! Discrete Fourier calculus: transforms, multipliers, derivatives.
//!
//! The transform pair uses the unitary symmetric convention
//!   f̂(k) = (2π)⁻¹ h² Σ_j f(x_j) e^{−ik·x_j},
//!   f(x) = (2π)⁻¹ Δk² Σ_m f̂(k_m) e^{ik_m·x},
//! under which Parseval is exact: h² Σ|f|² = Δk² Σ|f̂|². Fourier multipliers
//! m(k) are applied through the raw DFT, where the normalization cancels.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid2D;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// Unnormalized 2D DFT in place on row-major n×n data.
fn dft2_raw(values: &mut [Complex64], n: usize, inverse: bool) {
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
    // rows
    for row in values.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    // columns through a gather/scatter buffer
    let mut col = vec![Complex64::ZERO; n];
    for ix in 0..n {
        for iy in 0..n {
            col[iy] = values[iy * n + ix];
        }
        fft.process_with_scratch(&mut col, &mut scratch);
        for iy in 0..n {
            values[iy * n + ix] = col[iy];
        }
    }
}

/// Spectral coefficients of a field, indexed like the wavenumber lattice.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid2D,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    #[inline]
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Spectral L² norm, equal to the physical one by Parseval.
    pub fn norm_l2(&self) -> f64 {
        let dk = self.grid.wavenumber_spacing();
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (s * dk * dk).sqrt()
    }
}

/// Forward transform with the symmetric normalization.
pub fn to_spectral(f: &ComplexField) -> SpectralField {
    let grid = f.grid();
    let n = grid.n();
    let mut coeffs = f.values().to_vec();
    dft2_raw(&mut coeffs, n, false);
    let scale = grid.cell_area() / (2.0 * std::f64::consts::PI);
    for iy in 0..n {
        for ix in 0..n {
            // (−1)^{mx+my} accounts for the −L origin of the node lattice
            let sign = if (ix + iy) % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[iy * n + ix] *= sign * scale;
        }
    }
    SpectralField { grid, coeffs }
}

/// Inverse of [`to_spectral`].
pub fn from_spectral(s: &SpectralField) -> ComplexField {
    let grid = s.grid;
    let n = grid.n();
    let dk = grid.wavenumber_spacing();
    let scale = dk * dk / (2.0 * std::f64::consts::PI);
    let mut values = s.coeffs.clone();
    for iy in 0..n {
        for ix in 0..n {
            let sign = if (ix + iy) % 2 == 0 { 1.0 } else { -1.0 };
            values[iy * n + ix] *= sign * scale;
        }
    }
    dft2_raw(&mut values, n, true);
    ComplexField::from_values(grid, values).expect("length preserved")
}

/// Applies the Fourier multiplier m(kx, ky) to `f`.
pub fn apply_symbol(f: &ComplexField, symbol: impl Fn(f64, f64) -> Complex64) -> ComplexField {
    let grid = f.grid();
    let n = grid.n();
    let mut values = f.values().to_vec();
    dft2_raw(&mut values, n, false);
    let inv_n2 = 1.0 / (n * n) as f64;
    for iy in 0..n {
        let ky = grid.wavenumber(iy);
        for ix in 0..n {
            let kx = grid.wavenumber(ix);
            values[iy * n + ix] *= symbol(kx, ky) * inv_n2;
        }
    }
    dft2_raw(&mut values, n, true);
    ComplexField::from_values(grid, values).expect("length preserved")
}

/// Real multipliers (the common case for functions of |k|²).
pub fn apply_real_symbol(f: &ComplexField, symbol: impl Fn(f64, f64) -> f64) -> ComplexField {
    apply_symbol(f, |kx, ky| Complex64::new(symbol(kx, ky), 0.0))
}

/// Applies a precomputed multiplier table (lattice storage order) in place;
/// the fast path for time-stepping loops that reuse one symbol many times.
pub fn apply_multiplier_table(f: &mut ComplexField, table: &[Complex64]) {
    let grid = f.grid();
    let n = grid.n();
    let inv_n2 = 1.0 / (n * n) as f64;
    let values = f.values_mut();
    dft2_raw(values, n, false);
    for (v, &m) in values.iter_mut().zip(table) {
        *v *= m * inv_n2;
    }
    dft2_raw(values, n, true);
}

/// (−Δ)^{s/2} as the multiplier |k|^s; s = 0 is the identity.
pub fn free_fractional_laplacian(f: &ComplexField, s: f64) -> Result<ComplexField> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!(
            "fractional exponent must satisfy s >= 0, got {s}"
        )));
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    Ok(apply_real_symbol(f, |kx, ky| {
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            0.0
        } else {
            k2.powf(s / 2.0)
        }
    }))
}

/// −Δ f as the multiplier |k|².
pub fn minus_laplacian(f: &ComplexField) -> ComplexField {
    apply_real_symbol(f, |kx, ky| kx * kx + ky * ky)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Spectral partial derivative. The Nyquist row/column is zeroed: an odd
/// multiplier has no symmetric partner there and would break self-adjointness.
pub fn spectral_derivative(f: &ComplexField, axis: Axis) -> ComplexField {
    let grid = f.grid();
    let nyq = grid.max_wavenumber();
    apply_symbol(f, |kx, ky| {
        let k = match axis {
            Axis::X => kx,
            Axis::Y => ky,
        };
        if k == -nyq {
            Complex64::ZERO
        } else {
            Complex64::new(0.0, k)
        }
    })
}

/// Fraction of spectral energy carried by modes with max(|mx|, |my|) > n/3.
pub fn high_band_energy_fraction(f: &ComplexField) -> f64 {
    let grid = f.grid();
    let n = grid.n();
    let cut = (n / 3) as i64;
    let hat = to_spectral(f);
    let mut high = 0.0;
    let mut total = 0.0;
    for iy in 0..n {
        let my = grid.mode(iy).abs();
        for ix in 0..n {
            let mx = grid.mode(ix).abs();
            let e = hat.coeffs()[iy * n + ix].norm_sqr();
            total += e;
            if mx.max(my) > cut {
                high += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        high / total
    }
}

/// True when the top third of the spectrum carries less than `tol` of the energy.
pub fn is_band_limited(f: &ComplexField, tol: f64) -> bool {
    high_band_energy_fraction(f) < tol
}


/// Smallest K with the modes |k| ≤ K carrying at least `fraction` of the
/// spectral energy; drives the wrap-horizon estimate for box simulations.
pub fn energy_bandwidth(f: &ComplexField, fraction: f64) -> f64 {
    let grid = f.grid();
    let hat = to_spectral(f);
    let mut pairs: Vec<(f64, f64)> = grid
        .wavenumbers()
        .map(|(j, kx, ky)| ((kx * kx + ky * ky).sqrt(), hat.coeffs()[j].norm_sqr()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (k, e) in pairs {
        acc += e;
        if acc >= fraction * total {
            return k;
        }
    }
    grid.max_wavenumber()
}
