//! The modified Bessel function K₀, accurate to ~1e−13 relative on (0, ∞).
//!
//! Three regimes: the ascending series for r ≤ 2, the large-argument
//! expansion (terms generated by recurrence, optimally truncated) for
//! r ≥ 18, and a Gauss–Legendre evaluation of the scaled representation
//! e^{−r}∫₀^∞ e^{−r(cosh θ − 1)} dθ in between, where neither expansion
//! reaches full double precision.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// K₀(r) for r > 0.
pub fn bessel_k0(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("K0 requires r > 0, got {r}")));
    }
    Ok(if r <= 2.0 {
        k0_series(r)
    } else if r < 18.0 {
        k0_quadrature(r)
    } else {
        k0_asymptotic(r)
    })
}

/// Ascending series: K₀ = −(ln(x/2) + γ) I₀(x) + Σ_{k≥1} (x²/4)^k/(k!)² H_k.
fn k0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut i0 = 1.0;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut harmonic = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        sum += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((x / 2.0).ln() + EULER_GAMMA) * i0 + sum
}

/// Scaled representation e^{−r} ∫₀^∞ e^{−r(cosh θ − 1)} dθ on a finite panel.
fn k0_quadrature(r: f64) -> f64 {
    // integrand below 1e−19 of its peak once r(cosh θ − 1) > 44
    let theta_max = (1.0 + 44.0 / r).acosh();
    let (x, w) = gauss_legendre(96);
    let half = 0.5 * theta_max;
    let mut sum = 0.0;
    for i in 0..x.len() {
        let theta = half * (x[i] + 1.0);
        sum += w[i] * half * (-r * (theta.cosh() - 1.0)).exp();
    }
    sum * (-r).exp()
}

/// Large-argument expansion √(π/2r) e^{−r} Σ_k c_k r^{−k}, truncated at the
/// smallest term; below ~1e−15 relative for r ≥ 18.
fn k0_asymptotic(r: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0f64;
    let mut k = 1.0f64;
    loop {
        let next = term * (-(2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * r);
        if next.abs() >= term.abs() || next.abs() < 1e-18 {
            if next.abs() < 1e-18 {
                sum += next;
            }
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    (std::f64::consts::PI / (2.0 * r)).sqrt() * (-r).exp() * sum
}

/// ‖K₀(√τ ·)‖_{L^m(ℝ²)}^m = 2π ∫₀^∞ K₀(√τ r)^m r dr by radial quadrature
/// over log-spaced panels (the integrable |ln|^m singularity sits at r = 0).
pub fn kernel_lm_norm(tau: f64, m: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("kernel norm requires tau > 0, got {tau}")));
    }
    if !(m >= 1.0) || !m.is_finite() {
        return Err(Error::Domain(format!(
            "Lebesgue exponent must satisfy 1 <= m < inf, got {m}"
        )));
    }
    let sqrt_tau = tau.sqrt();
    // support in u = √τ r: from deep inside the log singularity to the
    // exponential tail cutoff mu ≈ 45
    let u_lo = 1e-14;
    let u_hi = 45.0 / m + 10.0;
    let (x, w) = gauss_legendre(32);
    let mut total = 0.0;
    let mut a = u_lo;
    while a < u_hi {
        let b = (a * 2.0).min(u_hi);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for i in 0..x.len() {
            let u = mid + half * x[i];
            let r = u / sqrt_tau;
            let k0 = bessel_k0(u)?;
            total += w[i] * half / sqrt_tau * k0.powf(m) * 2.0 * std::f64::consts::PI * r;
        }
        a = b;
    }
    Ok(total.powf(1.0 / m))
}

/// Least-squares slope of ln ‖K₀(√τ ·)‖_m against ln τ over the given τ set.
pub fn kernel_norm_scaling_slope(taus: &[f64], m: f64) -> Result<f64> {
    if taus.len() < 2 {
        return Err(Error::Domain("scaling slope needs at least two tau values".into()));
    }
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .map(|&t| Ok((t.ln(), kernel_lm_norm(t, m)?.ln())))
        .collect::<Result<_>>()?;
    Ok(least_squares_slope(&pts))
}

/// Slope of the least-squares line through (x, y) points.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: K₀(r) = ∫₀^∞ e^{−r cosh θ} dθ by fine Simpson.
    fn k0_oracle(r: f64) -> f64 {
        let theta_max = (1.0f64 + 900.0 / r).acosh();
        let n = 400_000;
        let h = theta_max / n as f64;
        let f = |theta: f64| (-r * theta.cosh()).exp();
        let mut sum = f(0.0) + f(theta_max);
        for i in 1..n {
            let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += weight * f(i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn k0_at_one_matches_oracle_and_reference() {
        let got = bessel_k0(1.0).unwrap();
        let oracle = k0_oracle(1.0);
        assert!((got - oracle).abs() < 1e-12, "impl {got} oracle {oracle}");
        // frozen literature value
        assert!((got - 0.421_024_438_240_708_3).abs() < 1e-12);
    }

    #[test]
    fn all_three_branches_match_the_oracle() {
        for &r in &[0.05, 0.5, 1.9, 2.1, 5.0, 11.0, 17.9, 18.1, 30.0] {
            let got = bessel_k0(r).unwrap();
            let oracle = k0_oracle(r);
            let rel = (got - oracle).abs() / oracle;
            assert!(rel < 5e-13, "r = {r}: rel {rel}");
        }
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k0(-1.0).is_err());
    }

    #[test]
    fn positive_decreasing_convex() {
        let rs: Vec<f64> = (1..200).map(|i| 0.05 * i as f64).collect();
        let vals: Vec<f64> = rs.iter().map(|&r| bessel_k0(r).unwrap()).collect();
        assert!(vals.iter().all(|&v| v > 0.0));
        assert!(vals.windows(2).all(|p| p[1] < p[0]));
        assert!(vals.windows(3).all(|p| p[0] - 2.0 * p[1] + p[2] > 0.0));
    }

    #[test]
    fn small_r_log_bound_and_large_r_exponential_bound() {
        // K0(r) ~ |ln r| as r → 0 (the constant form 1 + |ln r| covers all of
        // (0, 1]) and K0(r) <= C e^{-r}/sqrt(r) for r > 1
        for i in 1..=20 {
            let r = i as f64 * 0.025;
            let v = bessel_k0(r).unwrap();
            assert!(v <= 1.5 * -r.ln(), "log rate at {r}: {v}");
        }
        for i in 1..=40 {
            let r = i as f64 * 0.025;
            let v = bessel_k0(r).unwrap();
            assert!(v <= 1.0 + (-r.ln()).max(0.0), "small-r bound at {r}: {v}");
        }
        for i in 1..=40 {
            let r = 1.0 + i as f64 * 0.5;
            let v = bessel_k0(r).unwrap();
            assert!(v <= 1.6 * (-r).exp() / r.sqrt(), "large-r bound at {r}: {v}");
        }
    }

    #[test]
    fn ode_residual_with_five_point_stencil() {
        // K0'' + K0'/r − K0 = 0; fourth-order stencils with a step scaled to
        // the local derivative growth keep the residual below 1e−8
        for &r in &[0.5, 1.0, 2.5, 4.0, 8.0, 12.0, 20.0] {
            let h = r / 250.0;
            let f = |x: f64| bessel_k0(x).unwrap();
            let d1 = (-f(r + 2.0 * h) + 8.0 * f(r + h) - 8.0 * f(r - h) + f(r - 2.0 * h))
                / (12.0 * h);
            let d2 = (-f(r + 2.0 * h) + 16.0 * f(r + h) - 30.0 * f(r) + 16.0 * f(r - h)
                - f(r - 2.0 * h))
                / (12.0 * h * h);
            let residual = (d2 + d1 / r - f(r)).abs();
            assert!(residual < 1e-8, "ODE residual {residual:.3e} at r = {r}");
        }
    }

    #[test]
    fn kernel_l1_norm_has_closed_form() {
        // ∫ K0(|x|) dx over the plane = 2π ∫ K0(r) r dr = 2π
        let got = kernel_lm_norm(1.0, 1.0).unwrap();
        let exact = 2.0 * std::f64::consts::PI;
        assert!((got - exact).abs() / exact < 1e-9, "{got} vs {exact}");
    }

    #[test]
    fn kernel_norm_scaling_change_of_variables() {
        // ‖K0(√(4τ)·)‖_m / ‖K0(√τ·)‖_m = 4^{−1/m}
        for &m in &[1.0, 2.0, 4.0] {
            let a = kernel_lm_norm(1.0, m).unwrap();
            let b = kernel_lm_norm(4.0, m).unwrap();
            let got = b / a;
            let exact = 4.0f64.powf(-1.0 / m);
            assert!((got - exact).abs() / exact < 1e-6, "m = {m}: {got} vs {exact}");
        }
    }

    #[test]
    fn kernel_l2_norm_is_finite() {
        let v = kernel_lm_norm(1.0, 2.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn scaling_slope_matches_minus_one_over_m() {
        let taus = [0.25, 0.5, 1.0, 2.0, 4.0];
        for &m in &[1.0, 2.0, 4.0] {
            let slope = kernel_norm_scaling_slope(&taus, m).unwrap();
            assert!(
                (slope + 1.0 / m).abs() < 1e-3,
                "m = {m}: slope {slope}, expected {}",
                -1.0 / m
            );
        }
    }
}
