//! Empirical surveys of the estimate inequalities: free-resolvent bounds, the
//! A(s) mapping bound, the equivalence of fractional powers with and without
//! the potential, the difference bound with its two computation routes, the
//! L^∞ interpolation bound, heat-kernel Gaussian domination, and the
//! zero-regular-point test.

pub mod bessel;
pub mod regular_point;

pub use bessel::{bessel_k0, kernel_lm_norm, kernel_norm_scaling_slope, least_squares_slope};
pub use regular_point::{regular_point_value, regular_point_verdict};

use num_complex::Complex64;
use std::io::Write;
use std::path::Path;

use crate::commutator::a_integral;
use crate::error::{Error, Result};
use crate::field::{multiply_by_weight, ComplexField, WeightKind};
use crate::operator::SpectralOperator;
use crate::potential::PotentialSpec;
use crate::quadrature::QuadratureRule;
use crate::spectral::{apply_real_symbol, free_fractional_laplacian};

/// One estimate survey: the ratio LHS/RHS over a sample set, with enough
/// header data to reproduce it exactly.
#[derive(Debug, Clone)]
pub struct RatioSurvey {
    pub estimate_id: String,
    pub params: Vec<(String, f64)>,
    pub seed: u64,
    pub grid_n: usize,
    pub grid_l: f64,
    /// (sample_id, ratio)
    pub samples: Vec<(usize, f64)>,
    /// Sup of the ratio at each swept parameter value (τ or t), when swept.
    pub per_parameter: Vec<(f64, f64)>,
}

impl RatioSurvey {
    fn new(estimate_id: &str, seed: u64, grid_n: usize, grid_l: f64) -> Self {
        Self {
            estimate_id: estimate_id.to_string(),
            params: Vec::new(),
            seed,
            grid_n,
            grid_l,
            samples: Vec::new(),
            per_parameter: Vec::new(),
        }
    }

    pub fn sup_ratio(&self) -> f64 {
        self.samples.iter().map(|&(_, r)| r).fold(0.0, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.samples
            .iter()
            .map(|&(_, r)| r)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn all_finite(&self) -> bool {
        self.samples.iter().all(|&(_, r)| r.is_finite())
    }

    /// CSV with a header row recording seed, grid and parameters.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        writeln!(
            w,
            "# estimate={} seed={} n={} L={} {}",
            self.estimate_id,
            self.seed,
            self.grid_n,
            self.grid_l,
            params.join(" ")
        )?;
        writeln!(w, "sample_id,ratio")?;
        for (id, r) in &self.samples {
            writeln!(w, "{id},{r:.17e}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Which weighted form of the free-resolvent estimate to survey.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolventVariant {
    /// ‖(τ−Δ)^{−1}f‖_q ≤ C τ^{−s₀} ‖f‖_k, 1/k = 1/q + 1 − s₀.
    Plain,
    /// ‖(τ−Δ)^{−1}⟨x⟩^{−a}f‖_q ≤ C τ^{−s₀} ‖f‖_q.
    WeightInside { a: f64 },
    /// ‖⟨x⟩^{−a}(τ−Δ)^{−1}f‖_q ≤ C τ^{−s₀} ‖f‖_q.
    WeightOutside { a: f64 },
}

/// Surveys one free-resolvent estimate over τ values and test fields.
pub fn survey_free_resolvent(
    variant: ResolventVariant,
    q: f64,
    s0: f64,
    taus: &[f64],
    fields: &[ComplexField],
    seed: u64,
) -> Result<RatioSurvey> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::Domain(format!(
            "free-resolvent survey requires 1 < q < inf, got q = {q}"
        )));
    }
    if !(s0 > 0.0 && s0 <= 1.0) {
        return Err(Error::Domain(format!(
            "free-resolvent survey requires 0 < s0 <= 1, got s0 = {s0}"
        )));
    }
    let k_inv = 1.0 / q + 1.0 - s0;
    if k_inv > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "conjugate exponent constraint violated: 1/k = 1/q + 1 - s0 = {k_inv} exceeds 1"
        )));
    }
    if let ResolventVariant::WeightInside { a } | ResolventVariant::WeightOutside { a } = variant {
        if !(a > 2.0 * (1.0 - s0)) {
            return Err(Error::Domain(format!(
                "weighted resolvent estimates require a > 2(1 - s0); got a = {a} with bound {}",
                2.0 * (1.0 - s0)
            )));
        }
    }
    let first = fields
        .first()
        .ok_or_else(|| Error::Config("survey needs at least one field".into()))?;
    let grid = first.grid();
    let mut survey = RatioSurvey::new(variant_id(variant), seed, grid.n(), grid.half_width());
    survey.params.push(("q".into(), q));
    survey.params.push(("s0".into(), s0));
    if let ResolventVariant::WeightInside { a } | ResolventVariant::WeightOutside { a } = variant {
        survey.params.push(("a".into(), a));
    }

    let mut id = 0;
    for &tau in taus {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        let mut sup_here: f64 = 0.0;
        for f in fields {
            let resolvent =
                |g: &ComplexField| apply_real_symbol(g, |kx, ky| 1.0 / (tau + kx * kx + ky * ky));
            let ratio = match variant {
                ResolventVariant::Plain => {
                    let k = 1.0 / k_inv;
                    resolvent(f).norm_lp(q) * tau.powf(s0) / f.norm_lp(k)
                }
                ResolventVariant::WeightInside { a } => {
                    let weighted = multiply_by_weight(f, WeightKind::BracketPower { s: -a })?;
                    resolvent(&weighted).norm_lp(q) * tau.powf(s0) / f.norm_lp(q)
                }
                ResolventVariant::WeightOutside { a } => {
                    let res = resolvent(f);
                    multiply_by_weight(&res, WeightKind::BracketPower { s: -a })?.norm_lp(q)
                        * tau.powf(s0)
                        / f.norm_lp(q)
                }
            };
            survey.samples.push((id, ratio));
            sup_here = sup_here.max(ratio);
            id += 1;
        }
        survey.per_parameter.push((tau, sup_here));
    }
    Ok(survey)
}

fn variant_id(v: ResolventVariant) -> &'static str {
    match v {
        ResolventVariant::Plain => "free_resolvent_lq",
        ResolventVariant::WeightInside { .. } => "free_resolvent_weight_inside",
        ResolventVariant::WeightOutside { .. } => "free_resolvent_weight_outside",
    }
}

/// Surveys ‖A(s)f‖_q / ‖f‖_{q'} with A(s) from the resolvent sandwich,
/// for 1 ≤ q ≤ 2 and 1 < s < 2.
pub fn survey_as_bound(
    op: &SpectralOperator,
    spec: &PotentialSpec,
    s: f64,
    q: f64,
    fields: &[ComplexField],
    rule: &QuadratureRule,
    seed: u64,
) -> Result<RatioSurvey> {
    if !(1.0..=2.0).contains(&q) {
        return Err(Error::Domain(format!(
            "the A(s) mapping bound is surveyed for 1 <= q <= 2, got q = {q}"
        )));
    }
    if !(s > 1.0 && s < 2.0) {
        return Err(Error::Domain(format!(
            "the A(s) mapping bound is surveyed for 1 < s < 2, got s = {s}"
        )));
    }
    let q_dual = if q == 1.0 { f64::INFINITY } else { q / (q - 1.0) };
    let grid = op.grid();
    let mut survey = RatioSurvey::new("as_lq_bound", seed, grid.n(), grid.half_width());
    survey.params.push(("s".into(), s));
    survey.params.push(("q".into(), q));
    for (id, f) in fields.iter().enumerate() {
        let af = a_integral(op, spec, s, f, rule)?;
        let denom = f.norm_lp(q_dual);
        let ratio = if denom > 0.0 {
            af.norm_lp(q) / denom
        } else {
            0.0
        };
        survey.samples.push((id, ratio));
    }
    Ok(survey)
}

#[derive(Debug, Clone)]
pub struct EquivalenceSurvey {
    pub s: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub skipped: usize,
    pub survey: RatioSurvey,
}

/// Surveys ‖(−Δ_V)^{s/2}f‖₂ / ‖(−Δ)^{s/2}f‖₂ for each s in `s_list`.
///
/// Dense-mode operators use the eigenbasis; matrix-free operators go through
/// the Balakrishnan quadrature, amortizing one multishift solve per field
/// across all exponents.
pub fn survey_equivalence(
    op: &SpectralOperator,
    s_list: &[f64],
    fields: &[ComplexField],
    rule: &QuadratureRule,
    two_sided: bool,
    seed: u64,
) -> Result<Vec<EquivalenceSurvey>> {
    for &s in s_list {
        if two_sided && !(0.0..1.0).contains(&s) {
            return Err(Error::Domain(format!(
                "the two-sided equivalence is surveyed for 0 <= s < 1, got {s}"
            )));
        }
        if !(0.0..=2.0).contains(&s) {
            return Err(Error::Domain(format!(
                "the one-sided comparison needs 0 <= s <= 2, got {s}"
            )));
        }
    }
    let grid = op.grid();
    let mut out: Vec<EquivalenceSurvey> = s_list
        .iter()
        .map(|&s| {
            let mut survey =
                RatioSurvey::new("fractional_power_equivalence", seed, grid.n(), grid.half_width());
            survey.params.push(("s".into(), s));
            EquivalenceSurvey {
                s,
                min_ratio: f64::INFINITY,
                max_ratio: 0.0,
                skipped: 0,
                survey,
            }
        })
        .collect();

    for (id, f) in fields.iter().enumerate() {
        let powered: Vec<ComplexField> = if op.has_spectral_calculus() {
            s_list
                .iter()
                .map(|&s| op.fractional_power_spectral(s, f))
                .collect::<Result<_>>()?
        } else {
            op.fractional_powers_balakrishnan(s_list, f, rule)?
        };
        for (slot, (&s, num)) in s_list.iter().zip(&powered).enumerate() {
            let denom = free_fractional_laplacian(f, s)?.norm_l2();
            if denom == 0.0 {
                out[slot].skipped += 1;
                continue;
            }
            let ratio = num.norm_l2() / denom;
            out[slot].survey.samples.push((id, ratio));
            out[slot].min_ratio = out[slot].min_ratio.min(ratio);
            out[slot].max_ratio = out[slot].max_ratio.max(ratio);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct DifferenceBoundReport {
    pub survey: RatioSurvey,
    /// Agreement between the direct difference and its resolvent-integral form.
    pub cross_route_max_rel: f64,
}

/// Surveys ‖(−Δ_V)^{s/2}f − (−Δ)^{s/2}f‖₂ against the interpolation bound
/// ‖(−Δ)^{s/2}f‖^{σ/s} ‖f‖^{1−σ/s}, cross-validating the difference via
///   c(s) ∫ τ^{s/2} (τ−Δ_V)^{−1} V (τ−Δ)^{−1} f dτ.
pub fn check_difference_bound(
    op: &SpectralOperator,
    s: f64,
    sigma: f64,
    fields: &[ComplexField],
    rule: &QuadratureRule,
    seed: u64,
) -> Result<DifferenceBoundReport> {
    if !(1.0..2.0).contains(&s) {
        return Err(Error::Domain(format!(
            "the difference bound is surveyed for 1 <= s < 2, got {s}"
        )));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Domain(format!(
            "the interpolation index must satisfy 0 < sigma < 1, got {sigma}"
        )));
    }
    let grid = op.grid();
    let v = op.potential().to_vec();
    let c_s = SpectralOperator::balakrishnan_coefficient(s, rule)?;
    let mut survey = RatioSurvey::new("fractional_power_difference", seed, grid.n(), grid.half_width());
    survey.params.push(("s".into(), s));
    survey.params.push(("sigma".into(), sigma));
    let mut cross_max: f64 = 0.0;

    for (id, f) in fields.iter().enumerate() {
        let with_v = if op.has_spectral_calculus() {
            op.fractional_power_spectral(s, f)?
        } else {
            op.fractional_power_balakrishnan(s, f, rule)?
        };
        let without_v = free_fractional_laplacian(f, s)?;
        let direct = with_v.sub(&without_v);

        // resolvent-sandwich route for the same difference
        let mut integral = ComplexField::zeros(grid);
        for (&tau, &w) in rule.nodes().iter().zip(rule.weights()) {
            let free_res = apply_real_symbol(f, |kx, ky| 1.0 / (tau + kx * kx + ky * ky));
            let mut vf = free_res.clone();
            for (val, &vv) in vf.values_mut().iter_mut().zip(&v) {
                *val *= vv;
            }
            let outer = op.resolvent_apply(tau, &vf)?;
            integral.add_scaled(Complex64::new(w * tau.powf(s / 2.0), 0.0), &outer);
        }
        // lower tail: the box free resolvent carries a 1/τ pole on the
        // constant mode, so the integrand is O(τ^{s/2−1}) near zero and the
        // truncated piece is restored from its τmin evaluation
        let tau_min = rule.tau_min();
        let inner_min = apply_real_symbol(f, |kx, ky| 1.0 / (tau_min + kx * kx + ky * ky));
        let mut v_inner = inner_min;
        for (val, &vv) in v_inner.values_mut().iter_mut().zip(&v) {
            *val *= vv;
        }
        let outer_min = op.resolvent_apply(tau_min, &v_inner)?;
        let low = (2.0 / s) * tau_min.powf(s / 2.0) * tau_min;
        integral.add_scaled(Complex64::new(low, 0.0), &outer_min);

        // upper tail to second order: both resolvents expand in 1/τ
        let up1 = rule.tau_max().powf(s / 2.0 - 1.0) / (1.0 - s / 2.0);
        let up2 = rule.tau_max().powf(s / 2.0 - 2.0) / (2.0 - s / 2.0);
        let mut vf = f.clone();
        for (val, &vv) in vf.values_mut().iter_mut().zip(&v) {
            *val *= vv;
        }
        integral.add_scaled(Complex64::new(up1, 0.0), &vf);
        let mut second = op.apply(&vf); // H (V f)
        let lap_f = apply_real_symbol(f, |kx, ky| kx * kx + ky * ky);
        let mut v_lap = lap_f;
        for (val, &vv) in v_lap.values_mut().iter_mut().zip(&v) {
            *val *= vv;
        }
        second.add_scaled(Complex64::ONE, &v_lap); // + V (−Δ f)
        integral.add_scaled(Complex64::new(-up2, 0.0), &second);
        integral.scale_in_place(Complex64::new(c_s, 0.0));

        let dn = direct.norm_l2();
        if dn > 0.0 {
            cross_max = cross_max.max(direct.sub(&integral).norm_l2() / dn);
        }

        let denom = without_v.norm_l2().powf(sigma / s) * f.norm_l2().powf(1.0 - sigma / s);
        let ratio = if denom > 0.0 { dn / denom } else { 0.0 };
        survey.samples.push((id, ratio));
    }
    Ok(DifferenceBoundReport {
        survey,
        cross_route_max_rel: cross_max,
    })
}

#[derive(Debug, Clone)]
pub struct LinfInterpolationReport {
    pub survey: RatioSurvey,
    /// Largest relative gap between the two terms of the split bound at the
    /// optimizing frequency threshold (an algebraic identity, ~1e−16).
    pub optimizer_equality_gap: f64,
}

/// Surveys ‖f‖_∞ / (‖(−Δ_V)^{s/2}f‖^{1/s} ‖f‖^{1−1/s}) for 1 < s < 2 and
/// verifies that the optimizing threshold equalizes the two Fourier tail
/// terms of the underlying split bound.
pub fn check_linf_interpolation(
    op: &SpectralOperator,
    s: f64,
    fields: &[ComplexField],
    seed: u64,
) -> Result<LinfInterpolationReport> {
    if !(s > 1.0 && s < 2.0) {
        return Err(Error::Domain(format!(
            "the sup-norm interpolation is surveyed for 1 < s < 2, got {s}"
        )));
    }
    let grid = op.grid();
    let mut survey = RatioSurvey::new("linf_interpolation", seed, grid.n(), grid.half_width());
    survey.params.push(("s".into(), s));
    let mut gap_max: f64 = 0.0;
    let lambda = (1.0 / (2.0 * (s - 1.0))).sqrt();
    for (id, f) in fields.iter().enumerate() {
        let n2 = f.norm_l2();
        if n2 == 0.0 {
            continue;
        }
        let with_v = op.fractional_power_spectral(s, f)?.norm_l2();
        let denom = with_v.powf(1.0 / s) * n2.powf(1.0 - 1.0 / s);
        let ratio = if denom > 0.0 {
            f.norm_linf() / denom
        } else {
            0.0
        };
        survey.samples.push((id, ratio));

        // free-case split bound: τ‖f‖ and λ τ^{1−s} ‖(−Δ)^{s/2}f‖ agree at
        // the optimizing τ = (λ Ns)^{1/s} N2^{−1/s}
        let ns = free_fractional_laplacian(f, s)?.norm_l2();
        if ns > 0.0 {
            let tau_star = (lambda * ns).powf(1.0 / s) * n2.powf(-1.0 / s);
            let term1 = tau_star * n2;
            let term2 = lambda * tau_star.powf(1.0 - s) * ns;
            gap_max = gap_max.max((term1 - term2).abs() / term1);
        }
    }
    Ok(LinfInterpolationReport {
        survey,
        optimizer_equality_gap: gap_max,
    })
}

#[derive(Debug, Clone)]
pub struct HeatDominationReport {
    /// Smallest certified (β, C) from the search grids, if any.
    pub certificate: Option<(f64, f64)>,
    pub coverage_at_certificate: f64,
    /// Most negative sampled kernel entry.
    pub min_entry: f64,
    /// (β, C, coverage) for every searched pair.
    pub rows: Vec<(f64, f64, f64)>,
    pub entries_checked: usize,
}

/// Certifies 0 ≤ e^{tΔ_V}(x,y) ≤ C e^{βtΔ}(x,y) on sampled kernel columns.
///
/// The dominating kernel is the free heat kernel of the periodic box: the
/// 3×3 periodic-image sum of (4πβt)^{−1} exp(−|x−y+2Lm|²/(4βt)). Kernel
/// columns come from the heat semigroup applied to unit-cell delta functions.
///
/// `atol` is the absolute accuracy floor of the kernel route (spectral
/// truncation ringing scales like e^{−t k_N²}); entries are compared as
/// value ≤ C·bound + atol, since below that level the discrete kernel
/// carries no information about the continuum one.
pub fn check_heat_domination(
    op: &SpectralOperator,
    ts: &[f64],
    betas: &[f64],
    c_values: &[f64],
    required_coverage: f64,
    stride: usize,
    atol: f64,
) -> Result<HeatDominationReport> {
    if op.potential_min() < 0.0 {
        return Err(Error::Domain(
            "heat-kernel domination requires a nonnegative potential".into(),
        ));
    }
    let grid = op.grid();
    let n = grid.n();
    let h = grid.spacing();
    let period = 2.0 * grid.half_width();

    let mut fail_counts = vec![0usize; betas.len() * c_values.len()];
    let mut total = 0usize;
    let mut min_entry = f64::INFINITY;

    for &t in ts {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("domination needs t > 0, got {t}")));
        }
        for sy in (0..n).step_by(stride) {
            for sx in (0..n).step_by(stride) {
                let mut delta = ComplexField::zeros(grid);
                delta.values_mut()[grid.idx(sx, sy)] = Complex64::new(1.0 / (h * h), 0.0);
                let column = op.heat_apply(t, &delta)?;
                let y0 = grid.coord(sx);
                let y1 = grid.coord(sy);
                for (j, x0, x1) in grid.nodes() {
                    let value = column.values()[j].re;
                    min_entry = min_entry.min(value);
                    total += 1;
                    for (bi, &beta) in betas.iter().enumerate() {
                        let bound = periodized_gaussian(x0 - y0, x1 - y1, beta * t, period);
                        for (ci, &c) in c_values.iter().enumerate() {
                            if value > c * bound + atol {
                                fail_counts[bi * c_values.len() + ci] += 1;
                            }
                        }
                    }
                }
            }
        }
    }

    let mut rows = Vec::new();
    let mut certificate = None;
    let mut coverage_at = 0.0;
    for (bi, &beta) in betas.iter().enumerate() {
        for (ci, &c) in c_values.iter().enumerate() {
            let coverage = 1.0 - fail_counts[bi * c_values.len() + ci] as f64 / total as f64;
            rows.push((beta, c, coverage));
            if certificate.is_none() && coverage >= required_coverage {
                certificate = Some((beta, c));
                coverage_at = coverage;
            }
        }
    }
    Ok(HeatDominationReport {
        certificate,
        coverage_at_certificate: coverage_at,
        min_entry,
        rows,
        entries_checked: total,
    })
}

/// Free heat kernel of the torus at effective time βt, summed over the 3×3
/// nearest periodic images.
fn periodized_gaussian(dx: f64, dy: f64, bt: f64, period: f64) -> f64 {
    let norm = 1.0 / (4.0 * std::f64::consts::PI * bt);
    let mut sum = 0.0;
    for mx in -1..=1 {
        for my in -1..=1 {
            let rx = dx + mx as f64 * period;
            let ry = dy + my as f64 * period;
            sum += (-(rx * rx + ry * ry) / (4.0 * bt)).exp();
        }
    }
    norm * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields;
    use crate::grid::Grid2D;
    use crate::operator::OperatorMode;
    use crate::potential::sample_potential;

    fn fields_for(grid: Grid2D, seed: u64, count: usize) -> Vec<ComplexField> {
        fields::survey_fields(grid, seed, count, (grid.n() / 6) as i64)
    }

    #[test]
    fn plain_resolvent_multiplier_bound_at_q2() {
        // q = 2, s0 = 1, k = 2: the ratio is sup_k τ/(τ+|k|²) ≤ 1
        let grid = Grid2D::new(32, 8.0).unwrap();
        let fs = fields_for(grid, 21, 4);
        let survey = survey_free_resolvent(
            ResolventVariant::Plain,
            2.0,
            1.0,
            &[0.0625, 0.25, 1.0, 4.0, 16.0],
            &fs,
            21,
        )
        .unwrap();
        assert!(survey.all_finite());
        assert!(survey.sup_ratio() <= 1.0 + 1e-12, "{}", survey.sup_ratio());
    }

    #[test]
    fn weighted_resolvent_requires_strict_inequality() {
        let grid = Grid2D::new(16, 8.0).unwrap();
        let fs = fields_for(grid, 3, 1);
        let err = survey_free_resolvent(
            ResolventVariant::WeightInside { a: 1.0 },
            2.0,
            0.5,
            &[1.0],
            &fs,
            3,
        );
        assert!(matches!(err, Err(Error::Domain(_))));
        let msg = format!("{}", err.unwrap_err());
        assert!(msg.contains("a > 2(1 - s0)"), "{msg}");
    }

    #[test]
    fn resolvent_survey_flat_across_decades() {
        // the estimate is scaling-sharp, so a multi-scale Gaussian/plane-wave
        // mix keeps the per-τ sup within ±25% over the sweep; the τ range is
        // limited to the scales 1/√τ the box can actually represent
        let grid = Grid2D::new(96, 12.0).unwrap();
        let fs = fields::survey_mix(grid, 5, 4);
        let taus: Vec<f64> = (-3..=3).map(|e| 2.0f64.powi(e)).collect();
        let survey =
            survey_free_resolvent(ResolventVariant::Plain, 4.0, 0.5, &taus, &fs, 5).unwrap();
        let sups: Vec<f64> = survey.per_parameter.iter().map(|&(_, s)| s).collect();
        let mean = sups.iter().sum::<f64>() / sups.len() as f64;
        let hi = sups.iter().cloned().fold(0.0, f64::max);
        let lo = sups.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(
            hi <= 1.25 * mean && lo >= 0.75 * mean,
            "sup range [{lo}, {hi}] around mean {mean}"
        );
    }

    #[test]
    fn as_bound_zero_for_free_operator() {
        let grid = Grid2D::new(16, 6.0).unwrap();
        let v = sample_potential(&PotentialSpec::zero(), grid);
        let op = SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap();
        let rule = op.default_rule(24).unwrap();
        let fs = fields_for(grid, 7, 3);
        let survey =
            survey_as_bound(&op, &PotentialSpec::zero(), 1.5, 2.0, &fs, &rule, 7).unwrap();
        assert_eq!(survey.sup_ratio(), 0.0);
    }

    #[test]
    fn equivalence_ratio_is_one_without_potential_or_exponent() {
        let grid = Grid2D::new(16, 6.0).unwrap();
        let spec = PotentialSpec::gaussian_bump(1.0, 1.0);
        let v = sample_potential(&spec, grid);
        let op = SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap();
        let rule = op.default_rule(24).unwrap();
        let fs = fields_for(grid, 9, 4);
        // s = 0: both sides are the identity
        let surveys = survey_equivalence(&op, &[0.0], &fs, &rule, true, 9).unwrap();
        assert!((surveys[0].min_ratio - 1.0).abs() < 1e-12);
        assert!((surveys[0].max_ratio - 1.0).abs() < 1e-12);
        // V = 0: ratio 1 for every s
        let v0 = sample_potential(&PotentialSpec::zero(), grid);
        let op0 = SpectralOperator::new(grid, &v0, OperatorMode::Dense).unwrap();
        let surveys = survey_equivalence(&op0, &[0.5], &fs, &rule, true, 9).unwrap();
        assert!((surveys[0].min_ratio - 1.0).abs() < 1e-10);
        assert!((surveys[0].max_ratio - 1.0).abs() < 1e-10);
    }

    #[test]
    fn difference_bound_routes_agree() {
        let grid = Grid2D::new(16, 6.0).unwrap();
        let spec = PotentialSpec::gaussian_bump(1.0, 1.0);
        let v = sample_potential(&spec, grid);
        let op = SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap();
        let rule = op.default_rule(96).unwrap();
        let fs = fields_for(grid, 11, 3);
        let report = check_difference_bound(&op, 1.25, 0.8, &fs, &rule, 11).unwrap();
        assert!(
            report.cross_route_max_rel < 1e-4,
            "cross-route gap {}",
            report.cross_route_max_rel
        );
        assert!(report.survey.all_finite());
    }

    #[test]
    fn difference_vanishes_for_zero_potential() {
        let grid = Grid2D::new(16, 6.0).unwrap();
        let v = sample_potential(&PotentialSpec::zero(), grid);
        let op = SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap();
        let rule = op.default_rule(48).unwrap();
        let fs = fields_for(grid, 13, 2);
        let report = check_difference_bound(&op, 1.5, 0.5, &fs, &rule, 13).unwrap();
        assert!(report.survey.sup_ratio() < 1e-9);
    }

    #[test]
    fn linf_interpolation_scale_invariant_with_equal_terms() {
        let grid = Grid2D::new(16, 6.0).unwrap();
        let spec = PotentialSpec::gaussian_bump(1.0, 1.0);
        let v = sample_potential(&spec, grid);
        let op = SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap();
        let f = fields::gaussian(grid, 1.0);
        let report = check_linf_interpolation(&op, 1.5, &[f.clone()], 15).unwrap();
        assert!(report.optimizer_equality_gap < 1e-10);
        let scaled = f.scaled(Complex64::new(0.0, -7.5));
        let report2 = check_linf_interpolation(&op, 1.5, &[scaled], 15).unwrap();
        let r1 = report.survey.samples[0].1;
        let r2 = report2.survey.samples[0].1;
        assert!((r1 - r2).abs() / r1 < 1e-12, "{r1} vs {r2}");
    }

    #[test]
    fn heat_domination_free_case_certifies_at_one() {
        let grid = Grid2D::new(16, 6.0).unwrap();
        let v = sample_potential(&PotentialSpec::zero(), grid);
        let op = SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap();
        let report = check_heat_domination(
            &op,
            &[0.75, 1.5],
            &[1.0],
            &[1.0 + 1e-9, 1.05],
            1.0,
            4,
            1e-12,
        )
        .unwrap();
        let (beta, c) = report.certificate.expect("free case must certify");
        assert_eq!(beta, 1.0);
        assert!(c <= 1.05);
        assert!(report.min_entry > -1e-10, "min entry {}", report.min_entry);
    }

    #[test]
    fn heat_domination_rejects_negative_potential() {
        let grid = Grid2D::new(16, 6.0).unwrap();
        let spec = PotentialSpec::gaussian_bump(1.0, 1.0).scaled(-1.0);
        let v = sample_potential(&spec, grid);
        let op = SpectralOperator::new(grid, &v, OperatorMode::Dense).unwrap();
        assert!(matches!(
            check_heat_domination(&op, &[1.0], &[1.0], &[1.05], 0.999, 4, 1e-12),
            Err(Error::Domain(_))
        ));
    }
}
