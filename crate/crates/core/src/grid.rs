//! Uniform periodic discretization of the square [−L, L)².
//!
//! Nodes are x_i = −L + i·h with h = 2L/n, and the dual lattice carries the
//! wavenumbers k_m = (π/L)·m for integer m ∈ [−n/2, n/2). The lone Nyquist
//! row/column (m = −n/2) is the only asymmetric mode.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n: usize,
    half_width: f64,
}

impl Grid2D {
    /// Builds the grid; `n` must be even and ≥ 8 (powers of two transform
    /// fastest, but 3·2^k sizes are accepted too), `half_width` > 0.
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::Config(format!(
                "grid size n must be even and at least 8, got {n}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Config(format!(
                "half-width L must be positive and finite, got {half_width}"
            )));
        }
        Ok(Self { n, half_width })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of nodes, n².
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Domain half-width L; the box is [−L, L)².
    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Node spacing h = 2L/n.
    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Quadrature weight of one cell, h².
    #[inline]
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Wavenumber spacing Δk = π/L.
    #[inline]
    pub fn wavenumber_spacing(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Coordinate of node index i along one axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Signed integer mode m ∈ [−n/2, n/2) for storage index i.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Wavenumber k = (π/L)·m for storage index i.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.wavenumber_spacing() * self.mode(i) as f64
    }

    /// Row-major flat index of node (ix, iy); ix varies fastest.
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    /// Largest |k| on the lattice (the Nyquist wavenumber π n/(2L)).
    #[inline]
    pub fn max_wavenumber(&self) -> f64 {
        self.wavenumber_spacing() * (self.n as f64 / 2.0)
    }

    /// Iterator over (flat index, x, y).
    pub fn nodes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let n = self.n;
        (0..n * n).map(move |j| {
            let ix = j % n;
            let iy = j / n;
            (j, self.coord(ix), self.coord(iy))
        })
    }

    /// Iterator over (flat index, kx, ky).
    pub fn wavenumbers(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let n = self.n;
        (0..n * n).map(move |j| {
            let ix = j % n;
            let iy = j / n;
            (j, self.wavenumber(ix), self.wavenumber(iy))
        })
    }

    /// True if the flat spectral index touches the Nyquist row or column.
    #[inline]
    pub fn is_nyquist(&self, j: usize) -> bool {
        let half = self.n / 2;
        j % self.n == half || j / self.n == half
    }

    /// Shortest periodic-image displacement equivalent to `d` on one axis.
    #[inline]
    pub fn min_image(&self, d: f64) -> f64 {
        let period = 2.0 * self.half_width;
        let mut r = d % period;
        if r < -self.half_width {
            r += period;
        } else if r >= self.half_width {
            r -= period;
        }
        r
    }
}
