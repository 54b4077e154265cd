//! Quadrature rules for the resolvent integrals over τ ∈ (0, ∞).
//!
//! The working rule is Gauss–Legendre applied after the substitution τ = e^σ,
//! which resolves integrands behaving like τ^{a−1} near 0 and τ^{a−2} at
//! infinity uniformly on a log scale. The truncated tails are handled
//! analytically by the operator-calculus callers.

use crate::error::{Error, Result};
use crate::grid::Grid2D;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Nodes τ_i, strictly increasing, all positive.
    nodes: Vec<f64>,
    /// Weights including the dτ = τ dσ Jacobian: ∫ g dτ ≈ Σ w_i g(τ_i).
    weights: Vec<f64>,
    tau_min: f64,
    tau_max: f64,
}

impl QuadratureRule {
    /// Gauss–Legendre in log scale on [tau_min, tau_max].
    pub fn log_gauss(node_count: usize, tau_min: f64, tau_max: f64) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::Config(format!(
                "quadrature needs at least 2 nodes, got {node_count}"
            )));
        }
        if !(tau_min > 0.0 && tau_max > tau_min) {
            return Err(Error::Config(format!(
                "truncation bounds must satisfy 0 < tau_min < tau_max, got [{tau_min}, {tau_max}]"
            )));
        }
        let (x, w) = gauss_legendre(node_count);
        let a = tau_min.ln();
        let b = tau_max.ln();
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut nodes = Vec::with_capacity(node_count);
        let mut weights = Vec::with_capacity(node_count);
        for i in 0..node_count {
            let sigma = mid + half * x[i];
            let tau = sigma.exp();
            nodes.push(tau);
            weights.push(w[i] * half * tau);
        }
        Ok(Self {
            nodes,
            weights,
            tau_min,
            tau_max,
        })
    }

    /// Default truncation for an operator with spectrum in [0, mu_max]:
    /// tau_min = 1e−6 (π/L)², tau_max = 1e3 · mu_max.
    pub fn default_for_operator(grid: Grid2D, mu_max: f64, node_count: usize) -> Result<Self> {
        let mu_min_proxy = grid.wavenumber_spacing().powi(2);
        Self::log_gauss(node_count, 1e-6 * mu_min_proxy, 1e3 * mu_max.max(1.0))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn tau_min(&self) -> f64 {
        self.tau_min
    }

    #[inline]
    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    /// ∫ g(τ) dτ over [tau_min, tau_max].
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * g(t))
            .sum()
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1],
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree 15 is exact for 8 nodes
        let got: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(14)).sum();
        let exact = 2.0 / 15.0;
        assert!((got - exact).abs() < 1e-14);
        let odd: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(7)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let (_, w) = gauss_legendre(40);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
    }

    #[test]
    fn log_rule_is_increasing_with_positive_weights() {
        let rule = QuadratureRule::log_gauss(50, 1e-6, 1e4).unwrap();
        assert!(rule.nodes().windows(2).all(|p| p[1] > p[0]));
        assert!(rule.weights().iter().all(|&w| w > 0.0));
        assert_eq!(rule.len(), 50);
    }

    #[test]
    fn log_rule_integrates_resolvent_kernel() {
        // ∫_0^∞ τ^{-1/2} (1+τ)^{-1} dτ = π; truncation tails are ~1.3e-2,
        // so compare against the truncated integral computed independently.
        let rule = QuadratureRule::log_gauss(200, 1e-8, 1e8).unwrap();
        let got = rule.integrate(|t| t.powf(-0.5) / (1.0 + t));
        let lower = 2.0 * rule.tau_min().sqrt(); // ∫_0^τmin ≈ 2√τmin
        let upper = 2.0 / rule.tau_max().sqrt(); // ∫_τmax^∞ ≈ 2/√τmax
        let exact = std::f64::consts::PI - lower - upper;
        assert!(
            (got - exact).abs() < 1e-10,
            "got {got}, expected {exact}"
        );
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(QuadratureRule::log_gauss(10, 0.0, 1.0).is_err());
        assert!(QuadratureRule::log_gauss(10, 1.0, 0.5).is_err());
        assert!(QuadratureRule::log_gauss(1, 0.1, 1.0).is_err());
    }
}
