//! Closed-form storage capacities and the `q → 1` consistency check.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::replica::{alpha_of_q, SeriesConfig};
use crate::specfun::{gauss_mass, normal_pdf, upper_tail, GaussInterval};

/// Sampled `α_c(λ)` with its numerical derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve {
    pub lambdas: Vec<f64>,
    pub alpha_c: Vec<f64>,
    pub dalpha_dlambda: Vec<f64>,
    pub truncation_k: Vec<usize>,
}

/// Classical capacity `1 / ∫_{-κ}^∞ Dy (κ+y)²` for margin `κ ≥ 0`.
pub fn classical_alpha_c(kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("kappa must be finite and >= 0, got {kappa}")));
    }
    let moment = (1.0 + kappa * kappa) * upper_tail(-kappa) + kappa * normal_pdf(kappa);
    Ok(1.0 / moment)
}

/// `∫_a^b (u-a)² φ(u) du` from the elementary antiderivative.
pub fn shifted_second_moment(a: f64, b: f64) -> Result<f64> {
    let i0 = gauss_mass(GaussInterval::new(a, b)?);
    let i1 = normal_pdf(a) - normal_pdf(b) - a * i0;
    Ok(-(b - a) * normal_pdf(b) + i0 - a * i1)
}

/// Capacity denominator and the number of terms summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Denominator {
    pub value: f64,
    pub k_used: usize,
}

fn check_lambda(lambda: f64, allow_zero: bool) -> Result<()> {
    let ok = lambda.is_finite() && (lambda > 0.0 || (allow_zero && lambda == 0.0));
    if !ok {
        return Err(Error::InvalidArgument(format!("invalid lambda {lambda}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// `Σ_{k≥0} ∫_0^P ω² φ(ω + kP) dω` with `P = 2π/λ`.
///
/// Term `k` is `∫_{kP}^{(k+1)P} (u-kP)² φ(u) du`. Every later term is bounded
/// by `P² φ`-mass beyond `kP`, so summation stops at the first `K` with
/// `P² Q(KP) < tol`.
pub fn capacity_denominator(lambda: f64, tol: f64) -> Result<Denominator> {
    check_lambda(lambda, false)?;
    check_tol(tol)?;
    let p = 2.0 * PI / lambda;
    let mut value = 0.0;
    let mut k = 0usize;
    while p * p * upper_tail(k as f64 * p) >= tol {
        let a = k as f64 * p;
        value += shifted_second_moment(a, a + p)?;
        k += 1;
    }
    Ok(Denominator { value, k_used: k })
}

/// Storage capacity `α_c(λ)`, exactly 2 at `λ = 0`.
pub fn alpha_c(lambda: f64, tol: f64) -> Result<f64> {
    check_lambda(lambda, true)?;
    check_tol(tol)?;
    if lambda == 0.0 {
        return Ok(2.0);
    }
    Ok(1.0 / capacity_denominator(lambda, tol)?.value)
}

/// Three-point derivative on a nonuniform grid, one-sided at the ends.
fn grid_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                (y[1] - y[0]) / (x[1] - x[0])
            } else if i == n - 1 {
                (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2])
            } else {
                let (hm, hp) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                (hm * hm * y[i + 1] - hp * hp * y[i - 1] + (hp * hp - hm * hm) * y[i]) / (hm * hp * (hm + hp))
            }
        })
        .collect()
}

/// `α_c` and `dα_c/dλ` on a strictly increasing grid of `λ ≥ 0`.
pub fn capacity_curve(lambda_grid: &[f64], tol: f64) -> Result<CapacityCurve> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidArgument("empty lambda grid".into()));
    }
    if lambda_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("lambda grid must be strictly increasing".into()));
    }
    let points = lambda_grid
        .par_iter()
        .map(|&l| {
            check_lambda(l, true)?;
            if l == 0.0 {
                Ok((2.0, 0))
            } else {
                let d = capacity_denominator(l, tol)?;
                Ok((1.0 / d.value, d.k_used))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let alpha: Vec<f64> = points.iter().map(|p| p.0).collect();
    Ok(CapacityCurve {
        dalpha_dlambda: grid_derivative(lambda_grid, &alpha),
        lambdas: lambda_grid.to_vec(),
        alpha_c: alpha,
        truncation_k: points.iter().map(|p| p.1).collect(),
    })
}

/// `α` at which a `1/∫ Dω d(ω)²` law saturates, with `d(ω)` the distance
/// from `ω` to `∪_k [2kπ/λ, (2k+1)π/λ]`.
///
/// This is the closed form of `lim_{q→1} α(λ, q)` for the replica-symmetric
/// relation: as `q → 1` every `ω` outside the positive set pays the squared
/// distance to its nearest boundary, not to the boundary on its left.
pub fn boundary_distance_alpha_c(lambda: f64, tol: f64) -> Result<f64> {
    check_lambda(lambda, true)?;
    check_tol(tol)?;
    if lambda == 0.0 {
        return Ok(2.0);
    }
    let g = PI / lambda;
    // gap k spans ((2k+1)g, (2k+2)g); each half contributes a shifted second moment
    let gap = |k: i64| -> Result<f64> {
        let c = (2 * k + 1) as f64 * g;
        Ok(shifted_second_moment(c, c + 0.5 * g)? + shifted_second_moment(-c - g, -c - 0.5 * g)?)
    };
    let bound = |k: i64| {
        let c = (2 * k + 1) as f64 * g;
        let near = if c >= 0.0 { c } else { -(c + g) };
        0.25 * g * g * 2.0 * upper_tail(near)
    };
    let mut total = 0.0;
    let mut k = 0i64;
    loop {
        total += gap(k)?;
        if bound(k + 1) < tol {
            break;
        }
        k += 1;
    }
    let mut k = -1i64;
    loop {
        total += gap(k)?;
        if bound(k - 1) < tol {
            break;
        }
        k -= 1;
    }
    Ok(1.0 / total)
}

/// Outcome of [`alpha_q_limit_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCheck {
    pub lambda: f64,
    pub q_list: Vec<f64>,
    pub alphas: Vec<f64>,
    pub extrapolated: f64,
    pub closed_form: f64,
    pub rel_gap: f64,
}

/// Polynomial extrapolation of `(x_i, y_i)` to `x = 0` by Neville's scheme.
pub fn extrapolate_to_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = x.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        }
    }
    p[0]
}

/// Evaluates `α(λ, q)` on `q_list`, extrapolates to `q = 1` in `1-q`, and
/// compares with the closed form `α_c(λ)`.
pub fn alpha_q_limit_check(lambda: f64, q_list: &[f64], cfg: &SeriesConfig) -> Result<LimitCheck> {
    check_lambda(lambda, false)?;
    if q_list.is_empty() {
        return Err(Error::InvalidArgument("empty q list".into()));
    }
    if q_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("q list must be increasing toward 1".into()));
    }
    let alphas = q_list
        .iter()
        .map(|&q| alpha_of_q(lambda, q, cfg))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = q_list.iter().map(|q| 1.0 - q).collect();
    let extrapolated = extrapolate_to_zero(&x, &alphas);
    let closed_form = alpha_c(lambda, 1e-14)?;
    Ok(LimitCheck {
        lambda,
        q_list: q_list.to_vec(),
        alphas,
        extrapolated,
        closed_form,
        rel_gap: (extrapolated - closed_form).abs() / closed_form,
    })
}
