//! The discrete Schrödinger operator H = −Δ + V and its functional calculus:
//! resolvent, heat semigroup, fractional powers, and the Galilei-conjugated
//! operator M(−t)(−t²Δ_V)^{s/2}M(t).
//!
//! Three action routes share one interface: an exact Fourier diagonalization
//! when V ≡ 0, a dense eigendecomposition for grids up to n = 64, and a
//! matrix-free route (FFT applies plus conjugate-gradient resolvents) for
//! everything larger. Fractional powers come either from the eigenbasis
//! multiplier μ^{s/2} or from the resolvent quadrature
//!   (−Δ_V)^{s/2} f = c(s) ∫₀^∞ τ^{s/2−1} (−Δ_V)(τ−Δ_V)^{−1} f dτ,
//! discretized by a log-Gauss rule with analytic corrections for both
//! truncated tails.

use faer::{Col, Mat};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{gaussian_phase, ComplexField};
use crate::grid::Grid2D;
use crate::quadrature::QuadratureRule;
use crate::solver::{multishift_cg, pcg};
use crate::spectral::{apply_real_symbol, apply_symbol, minus_laplacian};

/// Largest grid admitted to dense mode; the matrix dimension is n².
pub const DENSE_MODE_MAX_N: usize = 64;
/// Relative residual target for conjugate-gradient resolvents.
pub const CG_TOLERANCE: f64 = 1e-10;
/// Contract tolerance for the resolvent post-condition.
pub const RESOLVENT_RESIDUAL_TOL: f64 = 1e-8;
/// Dense eigenpairs are rejected above this absolute residual.
pub const EIGENPAIR_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorMode {
    MatrixFree,
    Dense,
}

/// Verified dense eigendecomposition, ascending eigenvalues.
pub struct DenseEigen {
    eigenvalues: Vec<f64>,
    basis: Mat<f64>,
    max_pair_residual: f64,
}

enum Action {
    MatrixFree,
    /// V ≡ 0: plane waves diagonalize H exactly; applies go through the FFT.
    Fourier,
    Dense(Box<DenseEigen>),
}

pub struct SpectralOperator {
    grid: Grid2D,
    potential: Vec<f64>,
    v_max: f64,
    v_min: f64,
    action: Action,
}

impl SpectralOperator {
    /// Builds −Δ_V = −Δ + V on the grid. Dense mode is capped at n = 64 and
    /// performs (and verifies) the full eigendecomposition up front.
    pub fn new(grid: Grid2D, potential: &ComplexField, mode: OperatorMode) -> Result<Self> {
        if potential.grid() != grid {
            return Err(Error::Config("potential sampled on a different grid".into()));
        }
        if potential.max_imag_abs() > 0.0 {
            return Err(Error::Domain(
                "potential must be real-valued on every node".into(),
            ));
        }
        let v = potential.real_part();
        let v_max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let v_min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let v_is_zero = v.iter().all(|&x| x == 0.0);

        let action = match mode {
            OperatorMode::MatrixFree => Action::MatrixFree,
            OperatorMode::Dense if v_is_zero => Action::Fourier,
            OperatorMode::Dense => {
                if grid.n() > DENSE_MODE_MAX_N {
                    return Err(Error::Capacity(format!(
                        "dense mode is limited to n <= {DENSE_MODE_MAX_N}; n = {} gives a {}x{} matrix",
                        grid.n(),
                        grid.len(),
                        grid.len()
                    )));
                }
                Action::Dense(Box::new(dense_eigendecomposition(grid, &v)?))
            }
        };

        Ok(Self {
            grid,
            potential: v,
            v_max,
            v_min,
            action,
        })
    }

    #[inline]
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    #[inline]
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    #[inline]
    pub fn potential_max(&self) -> f64 {
        self.v_max
    }

    #[inline]
    pub fn potential_min(&self) -> f64 {
        self.v_min
    }

    pub fn potential_is_zero(&self) -> bool {
        self.potential.iter().all(|&x| x == 0.0)
    }

    /// True when spectral calculus (exact functions of H) is available.
    pub fn has_spectral_calculus(&self) -> bool {
        !matches!(self.action, Action::MatrixFree)
    }

    pub fn dense_eigen(&self) -> Option<&DenseEigen> {
        match &self.action {
            Action::Dense(d) => Some(d),
            _ => None,
        }
    }

    /// Upper bound proxy for the largest eigenvalue.
    pub fn spectral_radius_bound(&self) -> f64 {
        2.0 * self.grid.max_wavenumber().powi(2) + self.v_max.max(0.0)
    }

    /// The default quadrature rule covering this operator's spectral range.
    pub fn default_rule(&self, node_count: usize) -> Result<QuadratureRule> {
        QuadratureRule::default_for_operator(self.grid, self.spectral_radius_bound(), node_count)
    }

    /// H f = −Δ f + V f, always matrix-free through the FFT.
    pub fn apply(&self, f: &ComplexField) -> ComplexField {
        let mut out = minus_laplacian(f);
        for ((o, &fv), &vv) in out
            .values_mut()
            .iter_mut()
            .zip(f.values())
            .zip(&self.potential)
        {
            *o += vv * fv;
        }
        out
    }

    /// Rayleigh quotient ⟨f, Hf⟩/⟨f, f⟩.
    pub fn rayleigh_quotient(&self, f: &ComplexField) -> f64 {
        let hf = self.apply(f);
        f.inner(&hf).re / f.inner(f).re
    }

    /// Exact g(H) f in the eigenbasis (Fourier or dense).
    pub fn apply_spectral_function(
        &self,
        g: impl Fn(f64) -> Complex64,
        f: &ComplexField,
    ) -> Result<ComplexField> {
        match &self.action {
            Action::MatrixFree => Err(Error::Capability(
                "spectral function calculus requires a dense-mode operator".into(),
            )),
            Action::Fourier => Ok(apply_symbol(f, |kx, ky| g(kx * kx + ky * ky))),
            Action::Dense(d) => Ok(d.apply_function(self.grid, g, f)),
        }
    }

    /// (τ − Δ_V)^{−1} f for τ > 0, i.e. the solve (τ + H) u = f.
    pub fn resolvent_apply(&self, tau: f64, f: &ComplexField) -> Result<ComplexField> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!(
                "resolvent requires tau > 0, got {tau}"
            )));
        }
        let u = match &self.action {
            Action::Fourier => apply_real_symbol(f, |kx, ky| 1.0 / (tau + kx * kx + ky * ky)),
            Action::Dense(d) => d.apply_function(self.grid, |mu| one_over(tau + mu), f),
            Action::MatrixFree => {
                if self.potential_is_zero() {
                    apply_real_symbol(f, |kx, ky| 1.0 / (tau + kx * kx + ky * ky))
                } else {
                    let apply = |u: &ComplexField| {
                        let mut out = self.apply(u);
                        out.add_scaled(Complex64::new(tau, 0.0), u);
                        out
                    };
                    let precond = |r: &ComplexField| {
                        apply_real_symbol(r, |kx, ky| 1.0 / (tau + kx * kx + ky * ky))
                    };
                    let max_iter = 10 * self.grid.len();
                    let (u, _) = pcg(apply, precond, f, CG_TOLERANCE, max_iter)?;
                    u
                }
            }
        };
        // contract: ‖(τ + H)u − f‖ < 1e−8 ‖f‖
        let mut residual = self.apply(&u);
        residual.add_scaled(Complex64::new(tau, 0.0), &u);
        let res = residual.sub(f).norm_l2();
        let nf = f.norm_l2();
        if nf > 0.0 && res > RESOLVENT_RESIDUAL_TOL * nf {
            return Err(Error::Numeric(format!(
                "resolvent residual {:.3e} exceeds tolerance at tau = {tau}",
                res / nf
            )));
        }
        Ok(u)
    }

    /// e^{tΔ_V} f for t ≥ 0 (t = 0 returns f). Needs spectral calculus.
    pub fn heat_apply(&self, t: f64, f: &ComplexField) -> Result<ComplexField> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("heat semigroup requires t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(f.clone());
        }
        match &self.action {
            Action::MatrixFree => Err(Error::Capability(
                "heat semigroup requires a dense-mode operator".into(),
            )),
            _ => self.apply_spectral_function(|mu| Complex64::new((-t * mu).exp(), 0.0), f),
        }
    }

    /// (−Δ_V)^{s/2} f through the eigenbasis multiplier μ^{s/2}, 0 ≤ s ≤ 2.
    /// The operator kernel maps to zero for s > 0.
    pub fn fractional_power_spectral(&self, s: f64, f: &ComplexField) -> Result<ComplexField> {
        check_fractional_exponent(s, 0.0..=2.0)?;
        if matches!(self.action, Action::MatrixFree) {
            return Err(Error::Capability(
                "spectral fractional powers need dense mode; use fractional_power_balakrishnan"
                    .into(),
            ));
        }
        if s == 0.0 {
            return Ok(f.clone());
        }
        let floor = -1e-9 * self.spectral_radius_bound();
        if let Action::Dense(d) = &self.action {
            if d.eigenvalues[0] < floor {
                return Err(Error::Numeric(format!(
                    "fractional power undefined: smallest eigenvalue {:.3e} is negative",
                    d.eigenvalues[0]
                )));
            }
        }
        self.apply_spectral_function(
            |mu| {
                if mu <= 0.0 {
                    Complex64::ZERO
                } else {
                    Complex64::new(mu.powf(s / 2.0), 0.0)
                }
            },
            f,
        )
    }

    /// The Balakrishnan coefficient c(s), evaluated with the same quadrature
    /// rule and tail corrections as the operator integral.
    pub fn balakrishnan_coefficient(s: f64, rule: &QuadratureRule) -> Result<f64> {
        check_fractional_exponent_open(s)?;
        // scalar case μ = 1 of the quadrature symbol
        let c_inv = quad_fracpow_symbol(1.0, s, rule);
        Ok(1.0 / c_inv)
    }

    /// (−Δ_V)^{s/2} f by the resolvent quadrature, 0 < s < 2.
    ///
    /// Dense and Fourier modes evaluate the node resolvents exactly in the
    /// eigenbasis; the matrix-free route solves every shifted system from a
    /// single multishift conjugate-gradient Krylov space.
    pub fn fractional_power_balakrishnan(
        &self,
        s: f64,
        f: &ComplexField,
        rule: &QuadratureRule,
    ) -> Result<ComplexField> {
        Ok(self
            .fractional_powers_balakrishnan(&[s], f, rule)?
            .pop()
            .expect("one exponent in, one field out"))
    }

    /// The Balakrishnan integral for several exponents at once. Matrix-free
    /// operators solve all shifted systems from a single Krylov space and
    /// reuse it across exponents.
    pub fn fractional_powers_balakrishnan(
        &self,
        s_list: &[f64],
        f: &ComplexField,
        rule: &QuadratureRule,
    ) -> Result<Vec<ComplexField>> {
        for &s in s_list {
            check_fractional_exponent_open(s)?;
        }
        match &self.action {
            Action::Fourier => s_list
                .iter()
                .map(|&s| {
                    let c_s = Self::balakrishnan_coefficient(s, rule)?;
                    Ok(apply_real_symbol(f, |kx, ky| {
                        c_s * quad_fracpow_symbol(kx * kx + ky * ky, s, rule)
                    }))
                })
                .collect(),
            Action::Dense(d) => s_list
                .iter()
                .map(|&s| {
                    let c_s = Self::balakrishnan_coefficient(s, rule)?;
                    Ok(d.apply_function(
                        self.grid,
                        |mu| Complex64::new(c_s * quad_fracpow_symbol(mu.max(0.0), s, rule), 0.0),
                        f,
                    ))
                })
                .collect(),
            Action::MatrixFree => self.balakrishnan_matrix_free(s_list, f, rule),
        }
    }

    fn balakrishnan_matrix_free(
        &self,
        s_list: &[f64],
        f: &ComplexField,
        rule: &QuadratureRule,
    ) -> Result<Vec<ComplexField>> {
        // V ≡ 0 leaves the constant mode in the kernel; it maps to zero and
        // is removed up front so the shifted systems stay well-conditioned.
        let mut rhs = f.clone();
        if self.potential_is_zero() {
            let mean: Complex64 =
                rhs.values().iter().sum::<Complex64>() / rhs.values().len() as f64;
            for v in rhs.values_mut() {
                *v -= mean;
            }
        }

        let tau_min = rule.tau_min();
        let tau_max = rule.tau_max();
        // shifts relative to the base system (tau_min + H); delta 0 is the
        // tail solve at tau_min itself.
        let mut deltas = Vec::with_capacity(rule.len() + 1);
        deltas.push(0.0);
        for &tau in rule.nodes() {
            deltas.push(tau - tau_min);
        }
        let apply_base = |u: &ComplexField| {
            let mut out = self.apply(u);
            out.add_scaled(Complex64::new(tau_min, 0.0), u);
            out
        };
        let max_iter = 10 * self.grid.len();
        let (solutions, _stats) =
            multishift_cg(apply_base, &deltas, &rhs, CG_TOLERANCE, max_iter)?;
        let hf = self.apply(&rhs);
        let hhf = self.apply(&hf);

        s_list
            .iter()
            .map(|&s| {
                let c_s = Self::balakrishnan_coefficient(s, rule)?;
                // Σ_i w_i τ_i^{s/2−1} (f − τ_i x_i) + analytic tails
                let mut acc = ComplexField::zeros(self.grid);
                for (i, (&tau, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
                    let coeff = w * tau.powf(s / 2.0 - 1.0);
                    acc.add_scaled(Complex64::new(coeff, 0.0), &rhs);
                    acc.add_scaled(Complex64::new(-coeff * tau, 0.0), &solutions[i + 1]);
                }
                // lower tail: (2/s) τmin^{s/2} (f − τmin (τmin+H)^{−1} f)
                let low = (2.0 / s) * tau_min.powf(s / 2.0);
                acc.add_scaled(Complex64::new(low, 0.0), &rhs);
                acc.add_scaled(Complex64::new(-low * tau_min, 0.0), &solutions[0]);
                // upper tail to second order: up1 · H f − up2 · H² f
                let up1 = tau_max.powf(s / 2.0 - 1.0) / (1.0 - s / 2.0);
                let up2 = tau_max.powf(s / 2.0 - 2.0) / (2.0 - s / 2.0);
                acc.add_scaled(Complex64::new(up1, 0.0), &hf);
                acc.add_scaled(Complex64::new(-up2, 0.0), &hhf);
                acc.scale_in_place(Complex64::new(c_s, 0.0));
                Ok(acc)
            })
            .collect()
    }

    /// |J_V|^s(t) f = M(−t)(−t²Δ_V)^{s/2} M(t) f = t^s · M(−t)(−Δ_V)^{s/2} M(t) f.
    pub fn apply_jv(&self, t: f64, s: f64, f: &ComplexField) -> Result<ComplexField> {
        if t == 0.0 || !t.is_finite() {
            return Err(Error::Domain(format!(
                "Galilei conjugation requires t != 0, got {t}"
            )));
        }
        if s == 0.0 {
            return Ok(f.clone());
        }
        let conjugated = gaussian_phase(f, t)?;
        let powered = self.fractional_power_spectral(s, &conjugated)?;
        let back = gaussian_phase(&powered, -t)?;
        Ok(back.scaled(Complex64::new(t.abs().powf(s), 0.0)))
    }

    /// Writes the eigenvalue table as CSV with columns (index, eigenvalue).
    pub fn write_eigenvalue_table(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let mu = self.eigenvalues()?;
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "index,eigenvalue")?;
        for (i, m) in mu.iter().enumerate() {
            writeln!(w, "{i},{m:.17e}")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Ascending eigenvalues (dense and Fourier modes).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        match &self.action {
            Action::MatrixFree => Err(Error::Capability(
                "eigenvalue table requires a dense-mode operator".into(),
            )),
            Action::Fourier => {
                let mut mu: Vec<f64> = self
                    .grid
                    .wavenumbers()
                    .map(|(_, kx, ky)| kx * kx + ky * ky)
                    .collect();
                mu.sort_by(f64::total_cmp);
                Ok(mu)
            }
            Action::Dense(d) => Ok(d.eigenvalues.clone()),
        }
    }
}

#[inline]
fn one_over(x: f64) -> Complex64 {
    Complex64::new(1.0 / x, 0.0)
}

fn check_fractional_exponent(s: f64, range: std::ops::RangeInclusive<f64>) -> Result<()> {
    if range.contains(&s) && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "fractional exponent must lie in [{}, {}], got {s}",
            range.start(),
            range.end()
        )))
    }
}

fn check_fractional_exponent_open(s: f64) -> Result<()> {
    if s > 0.0 && s < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Balakrishnan exponent must lie in (0, 2), got {s}"
        )))
    }
}

/// Truncated quadrature value of μ^{s/2} = c(s)·∫ τ^{s/2−1} μ/(τ+μ) dτ
/// (without the c(s) prefactor), including both analytic tail corrections.
fn quad_fracpow_symbol(mu: f64, s: f64, rule: &QuadratureRule) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (&tau, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc += w * tau.powf(s / 2.0 - 1.0) * mu / (tau + mu);
    }
    let tau_min = rule.tau_min();
    let tau_max = rule.tau_max();
    acc += (2.0 / s) * tau_min.powf(s / 2.0) * mu / (tau_min + mu);
    acc += tau_max.powf(s / 2.0 - 1.0) / (1.0 - s / 2.0) * mu;
    acc -= tau_max.powf(s / 2.0 - 2.0) / (2.0 - s / 2.0) * mu * mu;
    acc
}

impl DenseEigen {
    #[inline]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[inline]
    pub fn max_pair_residual(&self) -> f64 {
        self.max_pair_residual
    }

    /// g(H) f = U g(Λ) Uᵀ f, applied to real and imaginary parts separately.
    fn apply_function(
        &self,
        grid: Grid2D,
        g: impl Fn(f64) -> Complex64,
        f: &ComplexField,
    ) -> ComplexField {
        let dim = grid.len();
        let re = Col::<f64>::from_fn(dim, |i| f.values()[i].re);
        let im = Col::<f64>::from_fn(dim, |i| f.values()[i].im);
        let c_re = self.basis.transpose() * &re;
        let c_im = self.basis.transpose() * &im;
        let mut out_re = Col::<f64>::zeros(dim);
        let mut out_im = Col::<f64>::zeros(dim);
        for j in 0..dim {
            let gj = g(self.eigenvalues[j]);
            let c = Complex64::new(c_re[j], c_im[j]) * gj;
            out_re[j] = c.re;
            out_im[j] = c.im;
        }
        let back_re = &self.basis * &out_re;
        let back_im = &self.basis * &out_im;
        let values: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(back_re[i], back_im[i]))
            .collect();
        ComplexField::from_values(grid, values).expect("dimension preserved")
    }
}

/// Assembles the dense matrix of −Δ + V. The spectral Laplacian block is a
/// circulant built from one inverse DFT of the multiplier |k|².
fn assemble_dense(grid: Grid2D, v: &[f64]) -> Mat<f64> {
    let n = grid.n();
    let dim = grid.len();
    let mut mult = ComplexField::zeros(grid);
    for (j, kx, ky) in grid.wavenumbers() {
        mult.values_mut()[j] = Complex64::new(kx * kx + ky * ky, 0.0);
    }
    // kernel κ(d) with H_free[i, j] = κ(x_i − x_j)
    let mut kappa = mult.values().to_vec();
    // raw inverse DFT / n² gives the convolution kernel of the multiplier
    {
        use rustfft::FftPlanner;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(n);
        let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
        for row in kappa.chunks_exact_mut(n) {
            fft.process_with_scratch(row, &mut scratch);
        }
        let mut col = vec![Complex64::ZERO; n];
        for ix in 0..n {
            for iy in 0..n {
                col[iy] = kappa[iy * n + ix];
            }
            fft.process_with_scratch(&mut col, &mut scratch);
            for iy in 0..n {
                kappa[iy * n + ix] = col[iy];
            }
        }
        let inv = 1.0 / (dim as f64);
        for c in &mut kappa {
            *c *= inv;
        }
    }
    Mat::from_fn(dim, dim, |i, j| {
        let (ix, iy) = (i % n, i / n);
        let (jx, jy) = (j % n, j / n);
        let dx = (ix + n - jx) % n;
        let dy = (iy + n - jy) % n;
        let free = kappa[dy * n + dx].re;
        if i == j {
            free + v[i]
        } else {
            free
        }
    })
}

fn dense_eigendecomposition(grid: Grid2D, v: &[f64]) -> Result<DenseEigen> {
    let h = assemble_dense(grid, v);
    let dim = grid.len();
    let evd = h
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Numeric(format!("dense eigendecomposition failed: {e:?}")))?;

    let mut order: Vec<usize> = (0..dim).collect();
    let s = evd.S();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&j| s[j]).collect();
    let u = evd.U();
    let basis = Mat::from_fn(dim, dim, |i, j| u[(i, order[j])]);

    // verify H U = U Λ column by column
    let hu = &h * &basis;
    let mut max_residual = 0.0f64;
    for j in 0..dim {
        let mut acc = 0.0f64;
        for i in 0..dim {
            let r = hu[(i, j)] - eigenvalues[j] * basis[(i, j)];
            acc += r * r;
        }
        max_residual = max_residual.max(acc.sqrt());
    }
    if max_residual > EIGENPAIR_RESIDUAL_TOL {
        return Err(Error::Numeric(format!(
            "eigenpair residual {max_residual:.3e} exceeds {EIGENPAIR_RESIDUAL_TOL:.1e}"
        )));
    }
    Ok(DenseEigen {
        eigenvalues,
        basis,
        max_pair_residual: max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields;
    use crate::potential::{sample_potential, PotentialSpec};

    fn dense_op(n: usize, l: f64, spec: &PotentialSpec) -> SpectralOperator {
        let grid = Grid2D::new(n, l).unwrap();
        let v = sample_potential(spec, grid);
        SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap()
    }

    #[test]
    fn free_eigenvalues_are_wavenumbers_squared() {
        let op = dense_op(8, std::f64::consts::PI, &PotentialSpec::zero());
        let mu = op.eigenvalues().unwrap();
        let mut expected: Vec<f64> = op
            .grid()
            .wavenumbers()
            .map(|(_, kx, ky)| kx * kx + ky * ky)
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in mu.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let grid = Grid2D::new(8, 2.0).unwrap();
        let c = 0.7;
        let v = ComplexField::constant(grid, Complex64::new(c, 0.0));
        let op = SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap();
        let free = dense_op(8, 2.0, &PotentialSpec::zero());
        let mu = op.eigenvalues().unwrap();
        let mu_free = free.eigenvalues().unwrap();
        for (a, b) in mu.iter().zip(&mu_free) {
            assert!((a - (b + c)).abs() < 1e-9, "{a} vs {}", b + c);
        }
    }

    #[test]
    fn bump_ground_state_obeys_rayleigh_bound() {
        let op = dense_op(16, 8.0, &PotentialSpec::gaussian_bump(1.0, 1.0));
        let mu = op.eigenvalues().unwrap();
        assert!(mu[0] >= -1e-9 * mu.last().unwrap());
        // Rayleigh quotient of the constant trial function is an upper bound
        let trial = ComplexField::constant(op.grid(), Complex64::ONE);
        let rq = op.rayleigh_quotient(&trial);
        assert!(mu[0] <= rq + 1e-10, "mu0 = {}, rq = {rq}", mu[0]);
    }

    #[test]
    fn nonnegative_potential_never_lowers_ground_state() {
        let free = dense_op(16, 8.0, &PotentialSpec::zero());
        let bump = dense_op(16, 8.0, &PotentialSpec::gaussian_bump(0.5, 1.5));
        assert!(bump.eigenvalues().unwrap()[0] >= free.eigenvalues().unwrap()[0] - 1e-10);
    }

    #[test]
    fn resolvent_on_plane_wave() {
        let op = dense_op(16, 2.0, &PotentialSpec::zero());
        let f = fields::plane_wave(op.grid(), 2, -1);
        let tau = 0.9;
        let k2 = op.grid().wavenumber(2).powi(2) + op.grid().wavenumber(15).powi(2);
        let u = op.resolvent_apply(tau, &f).unwrap();
        let expected = f.scaled(Complex64::new(1.0 / (tau + k2), 0.0));
        assert!(u.sub(&expected).norm_l2() / expected.norm_l2() < 1e-12);
    }

    #[test]
    fn resolvent_identity_and_large_tau_limit() {
        let op = dense_op(16, 6.0, &PotentialSpec::gaussian_bump(1.0, 1.0));
        let f = fields::random_band_limited(op.grid(), 3, 0.6);
        let tau = 2.3;
        let u = op.resolvent_apply(tau, &f).unwrap();
        let mut back = op.apply(&u);
        back.add_scaled(Complex64::new(tau, 0.0), &u);
        assert!(back.sub(&f).norm_l2() / f.norm_l2() < 1e-9);

        let tau_large = 1e4;
        let u = op
            .resolvent_apply(tau_large, &f)
            .unwrap()
            .scaled(Complex64::new(tau_large, 0.0));
        let hf_norm = op.apply(&f).norm_l2();
        let rel = u.sub(&f).norm_l2() / f.norm_l2();
        assert!(rel < 10.0 / tau_large * hf_norm / f.norm_l2());
    }

    #[test]
    fn matrix_free_resolvent_matches_dense() {
        let grid = Grid2D::new(32, 8.0).unwrap();
        let v = sample_potential(&PotentialSpec::gaussian_bump(1.0, 1.0), grid);
        let dense = SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap();
        let free = SpectralOperator::new(grid, &v, OperatorMode::MatrixFree).unwrap();
        let f = fields::random_band_limited(grid, 5, 0.6);
        let a = dense.resolvent_apply(0.4, &f).unwrap();
        let b = free.resolvent_apply(0.4, &f).unwrap();
        assert!(a.sub(&b).norm_l2() / a.norm_l2() < 1e-8);
    }

    #[test]
    fn heat_semigroup_property() {
        let op = dense_op(16, 6.0, &PotentialSpec::gaussian_bump(1.0, 1.0));
        let f = fields::random_band_limited(op.grid(), 7, 0.6);
        let one = op.heat_apply(0.3, &op.heat_apply(0.5, &f).unwrap()).unwrap();
        let two = op.heat_apply(0.8, &f).unwrap();
        assert!(one.sub(&two).norm_l2() / two.norm_l2() < 1e-10);
    }

    #[test]
    fn heat_on_plane_wave() {
        let op = dense_op(16, 2.0, &PotentialSpec::zero());
        let f = fields::plane_wave(op.grid(), 1, 2);
        let k2 = op.grid().wavenumber(1).powi(2) + op.grid().wavenumber(2).powi(2);
        let t = 0.37;
        let got = op.heat_apply(t, &f).unwrap();
        let expected = f.scaled(Complex64::new((-t * k2).exp(), 0.0));
        assert!(got.sub(&expected).norm_linf() < 1e-12);
    }

    #[test]
    fn fractional_power_multiplier_algebra() {
        let op = dense_op(16, 6.0, &PotentialSpec::gaussian_bump(1.0, 1.0));
        let f = fields::random_band_limited(op.grid(), 9, 0.6);
        // s = 0 identity
        let id = op.fractional_power_spectral(0.0, &f).unwrap();
        assert!(id.sub(&f).norm_linf() == 0.0);
        // s = 1 twice equals s = 2 once
        let one = op.fractional_power_spectral(1.0, &f).unwrap();
        let twice = op.fractional_power_spectral(1.0, &one).unwrap();
        let two = op.fractional_power_spectral(2.0, &f).unwrap();
        assert!(twice.sub(&two).norm_l2() / two.norm_l2() < 1e-10);
        // s = 2 equals the direct action up to the kernel clamp
        let direct = op.apply(&f);
        assert!(two.sub(&direct).norm_l2() / direct.norm_l2() < 1e-8);
    }

    #[test]
    fn fractional_power_on_free_plane_wave() {
        let op = dense_op(16, 2.0, &PotentialSpec::zero());
        let f = fields::plane_wave(op.grid(), 3, 1);
        let k2 = op.grid().wavenumber(3).powi(2) + op.grid().wavenumber(1).powi(2);
        for s in [0.5, 1.0, 1.7] {
            let got = op.fractional_power_spectral(s, &f).unwrap();
            let expected = f.scaled(Complex64::new(k2.powf(s / 2.0), 0.0));
            assert!(got.sub(&expected).norm_l2() / expected.norm_l2() < 1e-12);
        }
    }

    #[test]
    fn balakrishnan_coefficient_matches_closed_form() {
        let rule = QuadratureRule::log_gauss(200, 1e-10, 1e10).unwrap();
        for s in [0.5, 1.0, 1.5] {
            let c = SpectralOperator::balakrishnan_coefficient(s, &rule).unwrap();
            let exact = (std::f64::consts::PI * s / 2.0).sin() / std::f64::consts::PI;
            assert!((c - exact).abs() < 1e-10, "s={s}: {c} vs {exact}");
        }
    }

    #[test]
    fn balakrishnan_matches_spectral_route_dense() {
        let op = dense_op(16, 6.0, &PotentialSpec::gaussian_bump(1.0, 1.0));
        let rule = op.default_rule(200).unwrap();
        let f = fields::random_band_limited(op.grid(), 13, 0.6);
        for s in [0.5, 1.0, 1.5] {
            let a = op.fractional_power_balakrishnan(s, &f, &rule).unwrap();
            let b = op.fractional_power_spectral(s, &f).unwrap();
            let rel = a.sub(&b).norm_l2() / b.norm_l2();
            assert!(rel < 1e-7, "s = {s}: {rel}");
        }
    }

    #[test]
    fn balakrishnan_matrix_free_plane_wave() {
        let grid = Grid2D::new(32, 2.0).unwrap();
        let v = sample_potential(&PotentialSpec::zero(), grid);
        let op = SpectralOperator::new(grid, &v, OperatorMode::MatrixFree).unwrap();
        let rule = op.default_rule(200).unwrap();
        let f = fields::plane_wave(grid, 3, -2);
        let k2 = grid.wavenumber(3).powi(2) + grid.wavenumber(30).powi(2);
        let s = 0.5;
        let got = op.fractional_power_balakrishnan(s, &f, &rule).unwrap();
        let expected = f.scaled(Complex64::new(k2.powf(s / 2.0), 0.0));
        let rel = got.sub(&expected).norm_l2() / expected.norm_l2();
        assert!(rel < 1e-6, "rel = {rel}");
    }

    #[test]
    fn jv_norm_identity() {
        let op = dense_op(16, 6.0, &PotentialSpec::gaussian_bump(1.0, 1.0));
        let f = fields::random_band_limited(op.grid(), 17, 0.6);
        let (t, s) = (2.0, 1.3);
        let jv = op.apply_jv(t, s, &f).unwrap();
        let mt = gaussian_phase(&f, t).unwrap();
        let frac = op.fractional_power_spectral(s, &mt).unwrap();
        let expected = t.powf(s) * frac.norm_l2();
        assert!((jv.norm_l2() - expected).abs() / expected < 1e-12);
        // s = 0 is the identity
        let id = op.apply_jv(t, 0.0, &f).unwrap();
        assert!(id.sub(&f).norm_linf() == 0.0);
    }

    #[test]
    fn operator_actions_are_self_adjoint() {
        let op = dense_op(16, 6.0, &PotentialSpec::gaussian_bump(1.0, 1.0));
        let f = fields::random_band_limited(op.grid(), 19, 0.6);
        let g = fields::random_band_limited(op.grid(), 23, 0.6);
        let denom = f.norm_l2() * g.norm_l2();
        let pairs: Vec<(ComplexField, ComplexField)> = vec![
            (op.apply(&f), op.apply(&g)),
            (
                op.resolvent_apply(0.8, &f).unwrap(),
                op.resolvent_apply(0.8, &g).unwrap(),
            ),
            (
                op.heat_apply(0.5, &f).unwrap(),
                op.heat_apply(0.5, &g).unwrap(),
            ),
            (
                op.fractional_power_spectral(1.3, &f).unwrap(),
                op.fractional_power_spectral(1.3, &g).unwrap(),
            ),
        ];
        for (af, ag) in pairs {
            let lhs = af.inner(&g);
            let rhs = f.inner(&ag);
            assert!((lhs - rhs).norm() / denom < 1e-10);
        }
    }

    #[test]
    fn resolvent_commutes_with_heat() {
        let op = dense_op(16, 6.0, &PotentialSpec::gaussian_bump(1.0, 1.0));
        let f = fields::random_band_limited(op.grid(), 29, 0.6);
        let a = op
            .heat_apply(0.4, &op.resolvent_apply(1.1, &f).unwrap())
            .unwrap();
        let b = op
            .resolvent_apply(1.1, &op.heat_apply(0.4, &f).unwrap())
            .unwrap();
        assert!(a.sub(&b).norm_l2() / a.norm_l2() < 1e-9);
    }

    #[test]
    fn spectral_mapping_of_fractional_power() {
        let op = dense_op(8, 4.0, &PotentialSpec::gaussian_bump(1.0, 1.0));
        let d = op.dense_eigen().unwrap();
        let s = 1.2;
        // applying the fractional power to an eigenvector scales it by μ^{s/2}
        let dim = op.grid().len();
        let j = dim / 3;
        let vec = ComplexField::from_values(
            op.grid(),
            (0..dim)
                .map(|i| Complex64::new(d.basis[(i, j)], 0.0))
                .collect(),
        )
        .unwrap();
        let out = op.fractional_power_spectral(s, &vec).unwrap();
        let expected = vec.scaled(Complex64::new(d.eigenvalues[j].powf(s / 2.0), 0.0));
        assert!(out.sub(&expected).norm_l2() < 1e-9);
    }

    #[test]
    fn mode_errors() {
        let grid = Grid2D::new(128, 8.0).unwrap();
        let v = sample_potential(&PotentialSpec::gaussian_bump(1.0, 1.0), grid);
        assert!(matches!(
            SpectralOperator::new(grid, &v, OperatorMode::Dense),
            Err(Error::Capacity(_))
        ));
        let op = SpectralOperator::new(grid, &v, OperatorMode::MatrixFree).unwrap();
        let f = fields::random_band_limited(grid, 1, 0.5);
        assert!(matches!(
            op.fractional_power_spectral(0.5, &f),
            Err(Error::Capability(_))
        ));
        assert!(matches!(op.heat_apply(0.1, &f), Err(Error::Capability(_))));
        assert!(matches!(
            op.resolvent_apply(-1.0, &f),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            op.fractional_power_balakrishnan(2.5, &f, &op.default_rule(16).unwrap()),
            Err(Error::Domain(_))
        ));
    }
}
