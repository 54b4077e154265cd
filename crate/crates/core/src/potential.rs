//! Analytic potential families, hypothesis checks, and the virial weight
//! W = 2V + x·∇V. Gradients come from closed forms attached to each family,
//! never from grid differentiation.

use num_complex::Complex64;

use crate::field::ComplexField;
use crate::grid::Grid2D;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialTerm {
    /// c₀ e^{−|x|²/(2w²)}.
    GaussianBump { amplitude: f64, width: f64 },
    /// c₀ ⟨x⟩^{−β} = c₀ (1+|x|²)^{−β/2}.
    InversePower { amplitude: f64, decay: f64 },
}

impl PotentialTerm {
    fn value(&self, x: f64, y: f64) -> f64 {
        let r2 = x * x + y * y;
        match *self {
            Self::GaussianBump { amplitude, width } => {
                amplitude * (-r2 / (2.0 * width * width)).exp()
            }
            Self::InversePower { amplitude, decay } => amplitude * (1.0 + r2).powf(-decay / 2.0),
        }
    }

    fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let r2 = x * x + y * y;
        match *self {
            Self::GaussianBump { amplitude, width } => {
                let w2 = width * width;
                let v = amplitude * (-r2 / (2.0 * w2)).exp();
                (-x / w2 * v, -y / w2 * v)
            }
            Self::InversePower { amplitude, decay } => {
                let base = amplitude * decay * (1.0 + r2).powf(-decay / 2.0 - 1.0);
                (-x * base, -y * base)
            }
        }
    }
}

/// A potential given as a sum of closed-form terms; the empty sum is V ≡ 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialSpec {
    terms: Vec<PotentialTerm>,
}

impl PotentialSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn gaussian_bump(amplitude: f64, width: f64) -> Self {
        Self {
            terms: vec![PotentialTerm::GaussianBump { amplitude, width }],
        }
    }

    pub fn inverse_power(amplitude: f64, decay: f64) -> Self {
        Self {
            terms: vec![PotentialTerm::InversePower { amplitude, decay }],
        }
    }

    pub fn sum(terms: Vec<PotentialTerm>) -> Self {
        Self { terms }
    }

    /// Negating or rescaling a family; negative results fail (H2) by design.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| match *t {
                    PotentialTerm::GaussianBump { amplitude, width } => {
                        PotentialTerm::GaussianBump {
                            amplitude: amplitude * factor,
                            width,
                        }
                    }
                    PotentialTerm::InversePower { amplitude, decay } => {
                        PotentialTerm::InversePower {
                            amplitude: amplitude * factor,
                            decay,
                        }
                    }
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| match *t {
            PotentialTerm::GaussianBump { amplitude, .. } => amplitude == 0.0,
            PotentialTerm::InversePower { amplitude, .. } => amplitude == 0.0,
        })
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|t| t.value(x, y)).sum()
    }

    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |(gx, gy), t| {
            let (tx, ty) = t.gradient(x, y);
            (gx + tx, gy + ty)
        })
    }

    /// W(x) = 2V(x) + x·∇V(x), from the closed-form gradient.
    pub fn virial_value(&self, x: f64, y: f64) -> f64 {
        let (gx, gy) = self.gradient(x, y);
        2.0 * self.value(x, y) + x * gx + y * gy
    }
}

/// Samples V on the grid; the result is real-valued.
pub fn sample_potential(spec: &PotentialSpec, grid: Grid2D) -> ComplexField {
    ComplexField::from_fn(grid, |x, y| Complex64::new(spec.value(x, y), 0.0))
}

/// Samples W = 2V + x·∇V on the grid.
pub fn virial_weight(spec: &PotentialSpec, grid: Grid2D) -> ComplexField {
    ComplexField::from_fn(grid, |x, y| Complex64::new(spec.virial_value(x, y), 0.0))
}

/// Numerical certificate for the standing decay and sign hypotheses,
/// evaluated over the grid nodes of the computational box.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    /// Smallest c with ⟨x⟩^β (|V| + |x·∇V|) ≤ c over the nodes.
    pub h1_constant: f64,
    pub h1_beta_used: f64,
    /// True when β > 3, the standing range; false values are reported, not fatal.
    pub beta_in_range: bool,
    /// min V over nodes; the sign hypothesis needs this ≥ 0.
    pub h2_min: f64,
    /// max |V| on the outermost node ring.
    pub boundary_leak: f64,
    /// boundary_leak ≤ floor · sup|V|.
    pub h1_pass: bool,
    pub h2_pass: bool,
}

pub const DEFAULT_BOUNDARY_FLOOR: f64 = 1e-10;

/// Evaluates the decay and sign hypotheses on the grid. Never fails: a
/// violated hypothesis is reported through the verdict flags.
pub fn check_hypotheses(
    spec: &PotentialSpec,
    grid: Grid2D,
    beta: f64,
    boundary_floor: f64,
) -> HypothesisReport {
    let mut h1_constant: f64 = 0.0;
    let mut h2_min = f64::INFINITY;
    let mut sup_abs: f64 = 0.0;
    for (_, x, y) in grid.nodes() {
        let v = spec.value(x, y);
        let (gx, gy) = spec.gradient(x, y);
        let bracket = (1.0 + x * x + y * y).powf(beta / 2.0);
        h1_constant = h1_constant.max(bracket * (v.abs() + (x * gx + y * gy).abs()));
        h2_min = h2_min.min(v);
        sup_abs = sup_abs.max(v.abs());
    }
    let sampled = sample_potential(spec, grid);
    let boundary_leak = sampled.boundary_max_abs();
    HypothesisReport {
        h1_constant,
        h1_beta_used: beta,
        beta_in_range: beta > 3.0,
        h2_min,
        boundary_leak,
        h1_pass: h1_constant.is_finite() && boundary_leak <= boundary_floor * sup_abs.max(1e-300),
        h2_pass: h2_min >= 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::new(32, 12.0).unwrap()
    }

    #[test]
    fn zero_family_samples_to_zero() {
        let f = sample_potential(&PotentialSpec::zero(), grid());
        assert!(f.norm_linf() == 0.0);
        let w = virial_weight(&PotentialSpec::zero(), grid());
        assert!(w.norm_linf() == 0.0);
    }

    #[test]
    fn gaussian_bump_value_at_origin() {
        let spec = PotentialSpec::gaussian_bump(1.0, 1.0);
        assert!((spec.value(0.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_power_value_at_unit_radius() {
        // <x>² = 2 at |x| = 1, so V = 2^{−β/2} = 0.25 for β = 4
        let spec = PotentialSpec::inverse_power(1.0, 4.0);
        assert!((spec.value(1.0, 0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn virial_of_inverse_power_at_origin() {
        let spec = PotentialSpec::inverse_power(1.0, 4.0);
        assert!((spec.virial_value(0.0, 0.0) - 2.0).abs() < 1e-15);
        // closed form at |x| = 1: 2·2^{−2} − 4·1·2^{−3} = 0
        assert!((spec.virial_value(0.0, 1.0) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn virial_at_origin_is_twice_value_for_radial_families() {
        let spec = PotentialSpec::gaussian_bump(0.7, 1.3);
        assert!((spec.virial_value(0.0, 0.0) - 2.0 * spec.value(0.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn hypotheses_on_zero_potential() {
        let r = check_hypotheses(&PotentialSpec::zero(), grid(), 4.0, DEFAULT_BOUNDARY_FLOOR);
        assert_eq!(r.h1_constant, 0.0);
        assert_eq!(r.h2_min, 0.0);
        assert!(r.h1_pass && r.h2_pass);
    }

    #[test]
    fn hypotheses_on_gaussian_bump() {
        let r = check_hypotheses(
            &PotentialSpec::gaussian_bump(1.0, 1.0),
            grid(),
            4.0,
            DEFAULT_BOUNDARY_FLOOR,
        );
        assert!(r.h1_constant.is_finite() && r.h1_constant > 0.0);
        assert!(r.h2_min >= 0.0);
        assert!(r.h1_pass, "leak {}", r.boundary_leak);
        assert!(r.h2_pass);
        assert!(r.beta_in_range);
    }

    #[test]
    fn negated_family_fails_sign_hypothesis() {
        let flipped = PotentialSpec::gaussian_bump(1.0, 1.0).scaled(-1.0);
        let r = check_hypotheses(&flipped, grid(), 4.0, DEFAULT_BOUNDARY_FLOOR);
        assert!(!r.h2_pass);
        assert!(r.h2_min < 0.0);
    }

    #[test]
    fn h1_constant_scales_linearly_with_amplitude() {
        let base = check_hypotheses(
            &PotentialSpec::gaussian_bump(1.0, 1.0),
            grid(),
            4.0,
            DEFAULT_BOUNDARY_FLOOR,
        );
        let doubled = check_hypotheses(
            &PotentialSpec::gaussian_bump(2.0, 1.0),
            grid(),
            4.0,
            DEFAULT_BOUNDARY_FLOOR,
        );
        assert!((doubled.h1_constant - 2.0 * base.h1_constant).abs() < 1e-12);
    }

    #[test]
    fn virial_matches_directional_difference() {
        // radial decreasing V: W = 2V + rV'(r) checked by central differences
        let spec = PotentialSpec::gaussian_bump(1.0, 1.5);
        let h = 1e-5;
        for &(x, y) in &[(0.5f64, 0.25f64), (1.0, -2.0), (-3.0, 1.5)] {
            let r = (x * x + y * y).sqrt();
            let dir = (x / r, y / r);
            let vp = spec.value(x + h * dir.0, y + h * dir.1);
            let vm = spec.value(x - h * dir.0, y - h * dir.1);
            let fd = 2.0 * spec.value(x, y) + r * (vp - vm) / (2.0 * h);
            assert!(
                (spec.virial_value(x, y) - fd).abs() < 1e-8,
                "at ({x},{y}): {} vs {fd}",
                spec.virial_value(x, y)
            );
        }
    }
}
