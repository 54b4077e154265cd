//! Independent oracles for the acceptance suite. These deliberately avoid the
//! library's own quadrature and special-function code paths.

/// ∫₀^∞ g(τ) dτ by the exp-sinh double-exponential rule: τ = exp(π sinh u).
/// Handles integrable endpoint singularities like τ^{s/2−1} at machine level.
pub fn exp_sinh_integral(g: impl Fn(f64) -> f64, levels: u32) -> f64 {
    let h = 2.0f64.powi(-(levels as i32));
    let mut sum = 0.0;
    let half_pi = std::f64::consts::FRAC_PI_2;
    // |u| beyond ~4.4 underflows the double-exponential weight entirely
    let u_max = 4.4;
    let n = (u_max / h) as i64;
    for i in -n..=n {
        let u = i as f64 * h;
        let tau = (std::f64::consts::PI * u.sinh()).exp();
        let weight = std::f64::consts::PI * u.cosh() * tau;
        if !tau.is_finite() || !weight.is_finite() || weight == 0.0 {
            continue;
        }
        let val = g(tau);
        if val.is_finite() {
            sum += val * weight * h;
        }
    }
    let _ = half_pi;
    sum
}

/// K₀(r) = ∫₀^∞ e^{−r cosh θ} dθ by composite Simpson with a truncation far
/// below double precision.
pub fn bessel_k0_oracle(r: f64) -> f64 {
    let theta_max = (1.0f64 + 800.0 / r).acosh();
    let n = 200_000;
    let h = theta_max / n as f64;
    let f = |theta: f64| (-r * theta.cosh()).exp();
    let mut sum = f(0.0) + f(theta_max);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0
}

/// Prints the per-criterion verdict line and panics on failure.
pub fn criterion(id: u32, name: &str, pass: bool, detail: &str, started: std::time::Instant) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    eprintln!(
        "ACCEPTANCE {id:02} {name}: {verdict} [{detail}] ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
    assert!(pass, "acceptance criterion {id} ({name}) failed: {detail}");
}
