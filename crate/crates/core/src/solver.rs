//! Conjugate-gradient solvers for the shifted positive-definite systems
//! (τ + H)u = f that back the resolvent and the Balakrishnan quadrature.
//!
//! Two variants: a preconditioned CG for a single shift, and a multishift CG
//! that solves every quadrature shift from one Krylov space. The multishift
//! recurrence cannot be preconditioned, but the shifted residuals are exact
//! multiples of the base residual, so converged shifts freeze early.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;

#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Preconditioned conjugate gradient with zero initial guess.
pub fn pcg(
    apply_a: impl Fn(&ComplexField) -> ComplexField,
    precondition: impl Fn(&ComplexField) -> ComplexField,
    b: &ComplexField,
    tol: f64,
    max_iter: usize,
) -> Result<(ComplexField, CgStats)> {
    let norm_b = b.norm_l2();
    if norm_b == 0.0 {
        return Ok((
            ComplexField::zeros(b.grid()),
            CgStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let mut x = ComplexField::zeros(b.grid());
    let mut r = b.clone();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = r.inner(&z).re;
    for k in 0..max_iter {
        let ap = apply_a(&p);
        let pap = p.inner(&ap).re;
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::Numeric(format!(
                "CG lost positive-definiteness at iteration {k} (pAp = {pap})"
            )));
        }
        let alpha = rz / pap;
        x.add_scaled(Complex64::new(alpha, 0.0), &p);
        r.add_scaled(Complex64::new(-alpha, 0.0), &ap);
        let res = r.norm_l2();
        if res <= tol * norm_b {
            return Ok((
                x,
                CgStats {
                    iterations: k + 1,
                    relative_residual: res / norm_b,
                },
            ));
        }
        z = precondition(&r);
        let rz_new = r.inner(&z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        let mut p_next = z.clone();
        p_next.add_scaled(Complex64::new(beta, 0.0), &p);
        p = p_next;
    }
    let res = r.norm_l2() / norm_b;
    Err(Error::Numeric(format!(
        "CG failed to converge in {max_iter} iterations (relative residual {res:.3e})"
    )))
}

/// Multishift CG: solves (A₀ + δ_j)x_j = b for every δ_j ≥ 0 simultaneously.
///
/// `apply_a0` must be Hermitian positive definite. Returns the solutions in
/// the order of `deltas`.
pub fn multishift_cg(
    apply_a0: impl Fn(&ComplexField) -> ComplexField,
    deltas: &[f64],
    b: &ComplexField,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<ComplexField>, CgStats)> {
    if deltas.iter().any(|&d| d < 0.0 || !d.is_finite()) {
        return Err(Error::Domain("multishift CG requires shifts >= 0".into()));
    }
    let norm_b = b.norm_l2();
    let m = deltas.len();
    if norm_b == 0.0 {
        return Ok((
            vec![ComplexField::zeros(b.grid()); m],
            CgStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }

    // base system state
    let mut r = b.clone();
    let mut p = b.clone();
    let mut rho = r.inner(&r).re;
    let mut alpha_old = 1.0f64;
    let mut beta_old = 0.0f64;

    // per-shift state
    let mut xs = vec![ComplexField::zeros(b.grid()); m];
    let mut ps: Vec<ComplexField> = (0..m).map(|_| b.clone()).collect();
    let mut zeta_prev = vec![1.0f64; m];
    let mut zeta_cur = vec![1.0f64; m];
    let mut active = vec![true; m];

    for k in 0..max_iter {
        let ap = apply_a0(&p);
        let pap = p.inner(&ap).re;
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::Numeric(format!(
                "multishift CG lost positive-definiteness at iteration {k} (pAp = {pap})"
            )));
        }
        let alpha = rho / pap;

        let mut zeta_next = vec![0.0f64; m];
        for j in 0..m {
            if !active[j] {
                continue;
            }
            let num = zeta_cur[j] * zeta_prev[j] * alpha_old;
            let den = alpha * beta_old * (zeta_prev[j] - zeta_cur[j])
                + zeta_prev[j] * alpha_old * (1.0 + deltas[j] * alpha);
            zeta_next[j] = num / den;
            let alpha_j = alpha * zeta_next[j] / zeta_cur[j];
            xs[j].add_scaled(Complex64::new(alpha_j, 0.0), &ps[j]);
        }

        r.add_scaled(Complex64::new(-alpha, 0.0), &ap);
        let rho_new = r.inner(&r).re;
        let res = rho_new.sqrt();
        let beta = rho_new / rho;

        let mut all_done = true;
        for j in 0..m {
            if !active[j] {
                continue;
            }
            // shifted residual is ζ · base residual
            if zeta_next[j].abs() * res <= tol * norm_b {
                active[j] = false;
                continue;
            }
            all_done = false;
            let beta_j = beta * (zeta_next[j] / zeta_cur[j]).powi(2);
            let mut p_next = r.scaled(Complex64::new(zeta_next[j], 0.0));
            p_next.add_scaled(Complex64::new(beta_j, 0.0), &ps[j]);
            ps[j] = p_next;
            zeta_prev[j] = zeta_cur[j];
            zeta_cur[j] = zeta_next[j];
        }

        if all_done {
            return Ok((
                xs,
                CgStats {
                    iterations: k + 1,
                    relative_residual: res / norm_b,
                },
            ));
        }

        let mut p_next = r.clone();
        p_next.add_scaled(Complex64::new(beta, 0.0), &p);
        p = p_next;
        alpha_old = alpha;
        beta_old = beta;
        rho = rho_new;
    }

    let worst = (0..m)
        .filter(|&j| active[j])
        .map(|j| zeta_cur[j].abs() * rho.sqrt() / norm_b)
        .fold(0.0f64, f64::max);
    Err(Error::Numeric(format!(
        "multishift CG failed to converge in {max_iter} iterations (worst relative residual {worst:.3e})"
    )))
}
