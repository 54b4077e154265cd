//! The norms of the weighted and homogeneous Sobolev scales.

use crate::error::{Error, Result};
use crate::field::{multiply_by_weight, ComplexField, WeightKind};
use crate::spectral::{apply_real_symbol, free_fractional_laplacian};

/// Which norm to evaluate. Constructors validate the exponent ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// ‖f‖_{L^p}, 1 ≤ p ≤ ∞.
    Lp(f64),
    /// H^{m,s}: ‖(1+|x|²)^{s/2} (I−Δ)^{m/2} f‖_{L²}.
    Sobolev { m: f64, s: f64 },
    /// Ḣ^{s,0}: ‖(−Δ)^{s/2} f‖_{L²}, s ≥ 0.
    HomogeneousDerivative(f64),
    /// Ḣ^{0,s}: ‖|x|^s f‖_{L²}, s ≥ 0.
    HomogeneousWeight(f64),
    /// L^{p,s}: ‖⟨x⟩^s f‖_{L^p}.
    WeightedLp { p: f64, s: f64 },
}

impl NormKind {
    pub fn lp(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self::Lp(p))
    }

    pub fn sobolev(m: f64, s: f64) -> Result<Self> {
        if !m.is_finite() || !s.is_finite() {
            return Err(Error::Domain("Sobolev indices must be finite".into()));
        }
        Ok(Self::Sobolev { m, s })
    }

    pub fn homogeneous_derivative(s: f64) -> Result<Self> {
        check_s(s)?;
        Ok(Self::HomogeneousDerivative(s))
    }

    pub fn homogeneous_weight(s: f64) -> Result<Self> {
        check_s(s)?;
        Ok(Self::HomogeneousWeight(s))
    }

    pub fn weighted_lp(p: f64, s: f64) -> Result<Self> {
        check_p(p)?;
        check_s(s)?;
        Ok(Self::WeightedLp { p, s })
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Lebesgue exponent must satisfy 1 <= p <= inf, got {p}"
        )))
    }
}

fn check_s(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "homogeneous weight exponent must satisfy s >= 0, got {s}"
        )))
    }
}

/// Evaluates the requested norm of `f`.
pub fn norm(f: &ComplexField, kind: NormKind) -> f64 {
    match kind {
        NormKind::Lp(p) => f.norm_lp(p),
        NormKind::Sobolev { m, s } => {
            let bessel = apply_real_symbol(f, |kx, ky| (1.0 + kx * kx + ky * ky).powf(m / 2.0));
            let weighted = multiply_by_weight(&bessel, WeightKind::BracketPower { s })
                .expect("bracket weight is total");
            weighted.norm_l2()
        }
        NormKind::HomogeneousDerivative(s) => free_fractional_laplacian(f, s)
            .expect("validated s >= 0")
            .norm_l2(),
        NormKind::HomogeneousWeight(s) => multiply_by_weight(f, WeightKind::AbsPower { s })
            .expect("abs weight is total")
            .norm_l2(),
        NormKind::WeightedLp { p, s } => multiply_by_weight(f, WeightKind::BracketPower { s })
            .expect("bracket weight is total")
            .norm_lp(p),
    }
}
