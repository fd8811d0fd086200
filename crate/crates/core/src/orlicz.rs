//! Orlicz `ψ_p` norms on the uniform space `{0, .., n-1}`.
//!
//! `‖f‖_{ψ_p}` is the unique `λ > 0` with `(1/n) Σ exp(|f(i)|^p / λ^p) = e`
//! (zero for the zero vector). The average is strictly decreasing in `λ`,
//! so the root is found by bisection. All exponentials go through a
//! max-shifted log-sum-exp, so large ratios never overflow.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Outcome of a `ψ_p` norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiNormResult {
    pub value: f64,
    pub p: f64,
    pub iterations: u32,
    /// `|(1/n) Σ exp(|f|^p / value^p) − e|`.
    pub residual: f64,
}

const MAX_ITERATIONS: u32 = 2_000;

/// `ln((1/n) Σ exp(|f(i)|^p / λ^p))`.
pub fn log_orlicz_mean(f: &[f64], p: f64, lambda: f64) -> f64 {
    let powered: Vec<f64> = f.iter().map(|x| powp(x.abs(), p)).collect();
    let top = powered.iter().fold(0.0, |a: f64, &b| a.max(b));
    log_mean_exp_scaled(&powered, top, 1.0 / powp(lambda, p))
}

/// `(1/n) Σ exp(|f(i)|^p / λ^p)`; may be `+inf`.
pub fn orlicz_mean(f: &[f64], p: f64, lambda: f64) -> f64 {
    libm::exp(log_orlicz_mean(f, p, lambda))
}

/// `ln((1/n) Σ exp(s·w_i))` for `w_i ≥ 0` with `top = max w_i`.
fn log_mean_exp_scaled(w: &[f64], top: f64, s: f64) -> f64 {
    let shift = top * s;
    let sum: f64 = w.iter().map(|&v| libm::exp(v * s - shift)).sum();
    shift + libm::log(sum / w.len() as f64)
}

/// `‖f‖_{ψ_p}` by bisection on `λ`, stopping once the bracket's relative
/// width is at most `tol` and the defining equation holds to `tol`.
pub fn psi_norm(f: &[f64], p: f64, tol: f64) -> Result<PsiNormResult> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    if f.is_empty() {
        return Err(Error::bad_input("empty vector"));
    }
    if !(tol > 0.0) {
        return Err(Error::bad_input("tolerance must be positive"));
    }
    let top = f.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));
    if top == 0.0 {
        return Ok(PsiNormResult {
            value: 0.0,
            p,
            iterations: 0,
            residual: 0.0,
        });
    }
    let n = f.len() as f64;
    let powered: Vec<f64> = f.iter().map(|x| powp(x.abs(), p)).collect();
    let top_p = powp(top, p);
    // g(λ) = ln mean − 1 is positive below the root and negative above it.
    let g = |lambda: f64| log_mean_exp_scaled(&powered, top_p, 1.0 / powp(lambda, p)) - 1.0;
    let residual_at = |lambda: f64| core::f64::consts::E * libm::expm1(g(lambda)).abs();
    let spike = top / libm::pow(libm::log(n * (core::f64::consts::E - 1.0) + 1.0), 1.0 / p);
    let mut lo = spike * 1e-3;
    let mut hi = top * 1e3;
    while g(lo) <= 0.0 {
        lo *= 0.5;
    }
    while g(hi) > 0.0 {
        hi *= 2.0;
    }

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // geometric midpoint while the bracket spans orders of magnitude
        let mid = if hi > 4.0 * lo {
            libm::sqrt(lo * hi)
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * lo && residual_at(0.5 * (lo + hi)) <= tol {
            break;
        }
    }
    let value = 0.5 * (lo + hi);
    Ok(PsiNormResult {
        value,
        p,
        iterations,
        residual: residual_at(value),
    })
}

/// Checks `‖a‖_{ψ_p}^p = ‖|a|^p‖_{ψ_1}` to within `tol`.
pub fn psi_power_identity_check(a: &[f64], p: f64, tol: f64) -> Result<bool> {
    let lhs = libm::pow(psi_norm(a, p, 1e-14)?.value, p);
    let powered: Vec<f64> = a.iter().map(|x| powp(x.abs(), p)).collect();
    let rhs = psi_norm(&powered, 1.0, 1e-14)?.value;
    Ok((lhs - rhs).abs() <= tol)
}

/// If `P{|f| > t} ≤ A e^{−t²}` for all `t > 1`, then `‖f‖_{ψ_2} ≤ 2A`.
pub fn tail_to_psi2_bound(tail_constant: f64) -> Result<f64> {
    if !(tail_constant >= 1.0) {
        return Err(Error::BadConstant(tail_constant));
    }
    Ok(2.0 * tail_constant)
}

/// Closed form of `‖(1, 0, .., 0)‖_{ψ_p}` in dimension `n`:
/// `ln(n(e − 1) + 1)^{−1/p}`.
pub fn spike_psi_norm(n: usize, p: f64) -> f64 {
    libm::pow(libm::log(n as f64 * (core::f64::consts::E - 1.0) + 1.0), -1.0 / p)
}

fn powp(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else {
        libm::pow(x, p)
    }
}
