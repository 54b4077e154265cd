//! Complex scalar fields sampled on a [`Grid2D`].
//!
//! The discrete L² pairing carries the cell weight h², so Parseval holds
//! exactly against the symmetric spectral normalization in [`crate::spectral`].

use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid2D;

#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![Complex64::ZERO; grid.len()],
        }
    }

    pub fn constant(grid: Grid2D, c: Complex64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for (_, x, y) in grid.nodes() {
            values.push(f(x, y));
        }
        Self { grid, values }
    }

    pub fn from_values(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "value length {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        debug_assert!(self.same_grid(other));
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    /// In-place self += c · other.
    pub fn add_scaled(&mut self, c: Complex64, other: &Self) {
        debug_assert!(self.same_grid(other));
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn scale_in_place(&mut self, c: Complex64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// Pointwise product self ⊙ other.
    pub fn pointwise_mul(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    /// Discrete inner product ⟨f, g⟩ = h² Σ conj(f)·g.
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert!(self.same_grid(other));
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a.conj() * b)
            .sum();
        s * self.grid.cell_area()
    }

    pub fn norm_l2(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    pub fn norm_linf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// ‖f‖_p = (h² Σ |f|^p)^{1/p}; p = ∞ is the grid max.
    pub fn norm_lp(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.norm_linf();
        }
        let s: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        (s * self.grid.cell_area()).powf(1.0 / p)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Largest |f| on the outermost node ring.
    pub fn boundary_max_abs(&self) -> f64 {
        let n = self.grid.n();
        let mut m: f64 = 0.0;
        for i in 0..n {
            m = m.max(self.values[self.grid.idx(i, 0)].norm());
            m = m.max(self.values[self.grid.idx(i, n - 1)].norm());
            m = m.max(self.values[self.grid.idx(0, i)].norm());
            m = m.max(self.values[self.grid.idx(n - 1, i)].norm());
        }
        m
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Serializes to the flat binary snapshot layout:
    /// header n, L as little-endian 64-bit values, then n² (re, im) pairs.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(&(self.grid.n() as u64).to_le_bytes())?;
        w.write_all(&self.grid.half_width().to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let n = u64::from_le_bytes(buf8) as usize;
        r.read_exact(&mut buf8)?;
        let half_width = f64::from_le_bytes(buf8);
        let grid = Grid2D::new(n, half_width)?;
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            r.read_exact(&mut buf8)?;
            let re = f64::from_le_bytes(buf8);
            r.read_exact(&mut buf8)?;
            let im = f64::from_le_bytes(buf8);
            values.push(Complex64::new(re, im));
        }
        Self::from_values(grid, values)
    }

    /// Plot-friendly CSV dump with columns x, y, re, im.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "x,y,re,im")?;
        for (j, x, y) in self.grid.nodes() {
            let v = self.values[j];
            writeln!(w, "{x:.17e},{y:.17e},{:.17e},{:.17e}", v.re, v.im)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Pointwise weight families used throughout: the unimodular Gaussian phase
/// M(t) = e^{−i|x|²/(2t)}, the bracket ⟨x⟩^s and the homogeneous |x|^s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// M(t) = e^{−i|x|²/(2t)}, t ≠ 0.
    GaussianPhase { t: f64 },
    /// ⟨x⟩^s = (1 + |x|²)^{s/2}.
    BracketPower { s: f64 },
    /// |x|^s.
    AbsPower { s: f64 },
}

/// Multiplies `f` pointwise by the requested weight.
pub fn multiply_by_weight(f: &ComplexField, kind: WeightKind) -> Result<ComplexField> {
    match kind {
        WeightKind::GaussianPhase { t } => {
            if t == 0.0 || !t.is_finite() {
                return Err(Error::Domain(format!(
                    "Gaussian phase weight M(t) requires t != 0, got {t}"
                )));
            }
            Ok(ComplexField {
                grid: f.grid,
                values: f
                    .grid
                    .nodes()
                    .map(|(j, x, y)| {
                        let phase = -(x * x + y * y) / (2.0 * t);
                        f.values[j] * Complex64::from_polar(1.0, phase)
                    })
                    .collect(),
            })
        }
        WeightKind::BracketPower { s } => Ok(ComplexField {
            grid: f.grid,
            values: f
                .grid
                .nodes()
                .map(|(j, x, y)| f.values[j] * (1.0 + x * x + y * y).powf(s / 2.0))
                .collect(),
        }),
        WeightKind::AbsPower { s } => Ok(ComplexField {
            grid: f.grid,
            values: f
                .grid
                .nodes()
                .map(|(j, x, y)| {
                    let r2 = x * x + y * y;
                    if r2 == 0.0 && s > 0.0 {
                        Complex64::ZERO
                    } else {
                        f.values[j] * r2.powf(s / 2.0)
                    }
                })
                .collect(),
        }),
    }
}

/// Shorthand for M(t)·f.
pub fn gaussian_phase(f: &ComplexField, t: f64) -> Result<ComplexField> {
    multiply_by_weight(f, WeightKind::GaussianPhase { t })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::new(16, 1.0).unwrap()
    }

    #[test]
    fn l2_norm_of_unit_constant_is_two() {
        // area of [−1,1)² is 4, so ‖1‖_L² = 2
        let f = ComplexField::constant(grid(), Complex64::ONE);
        assert!((f.norm_l2() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_phase_round_trip_is_identity() {
        let g = grid();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x + 0.3, y - 0.1));
        let t = 1.7;
        let back = gaussian_phase(&gaussian_phase(&f, t).unwrap(), -t).unwrap();
        let err = back.sub(&f).norm_linf();
        assert!(err < 1e-14);
    }

    #[test]
    fn gaussian_phase_preserves_l2() {
        let g = grid();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new((x * y).sin(), x));
        let w = gaussian_phase(&f, 2.5).unwrap();
        assert!((w.norm_l2() - f.norm_l2()).abs() < 1e-13);
    }

    #[test]
    fn zero_bracket_power_is_identity() {
        let g = grid();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x, y));
        let w = multiply_by_weight(&f, WeightKind::BracketPower { s: 0.0 }).unwrap();
        assert!(w.sub(&f).norm_linf() < 1e-15);
    }

    #[test]
    fn gaussian_phase_rejects_t_zero() {
        let f = ComplexField::zeros(grid());
        assert!(matches!(
            multiply_by_weight(&f, WeightKind::GaussianPhase { t: 0.0 }),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn binary_snapshot_round_trip() {
        let g = grid();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x * y, x - y));
        let dir = std::env::temp_dir().join("nlslab_field_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("snap.bin");
        f.write_binary(&path).unwrap();
        let back = ComplexField::read_binary(&path).unwrap();
        assert_eq!(back.grid(), g);
        assert!(back.sub(&f).norm_linf() == 0.0);
    }
}
