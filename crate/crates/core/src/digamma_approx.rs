//! Lorentzian approximation `Φ̃` of the overlap derivative `Φ`.
//!
//! Replacing each Gaussian factor `e^{-x}` of the interval-form `Φ` by
//! `1/(1+x)` turns the sum over `k` into partial fractions that sum in closed
//! form through the digamma function. With `s = √(2λ²(q-1)) = iλ√(2(1-q))`,
//!
//! ```text
//! Z  = (λ√q ω - s) / 2π            W  = (λ√q ω + s) / 2π
//! C1 = (2√q λ - ω s) / (8π√q√(1-q)) C2 = (2√q λ + ω s) / (8π√q√(1-q))
//! Φ̃ = C1 [ψ(½+Z) - ψ(1+Z) + ψ(-Z) - ψ(½-Z)]
//!    + C2 [ψ(½+W) - ψ(½-W) + ψ(-W) - ψ(1+W)]
//! ```
//!
//! `W = conj Z` and `C2 = conj C1`, so `Φ̃` is real. Like the exponential sum
//! it approximates, `Φ̃` carries no `1/√(2π)` normalization.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::replica::ReplicaPoint;
use crate::specfun::digamma;

/// Relative size of the imaginary residue accepted before it is discarded.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Lower end of the documented validity range of the asymptotic form.
pub const ASYMPTOTIC_LAMBDA_MIN: f64 = 20.0;

const BRANCH_PROXIMITY: f64 = 1e-8;

/// The complex ingredients `Z`, `W`, `C1`, `C2` of `Φ̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiTildeParts {
    pub z: Complex64,
    pub w: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
}

fn require_open_q(pt: &ReplicaPoint) -> Result<()> {
    if pt.q() <= 0.0 {
        return Err(Error::Domain("the Lorentzian approximation needs 0 < q < 1".into()));
    }
    Ok(())
}

fn parts_with_root(pt: &ReplicaPoint, s: Complex64) -> PhiTildeParts {
    let (l, q, w) = (pt.lambda(), pt.q(), pt.omega());
    let mu = l * q.sqrt() * w;
    let norm = 8.0 * PI * q.sqrt() * (1.0 - q).sqrt();
    let lead = 2.0 * q.sqrt() * l;
    PhiTildeParts {
        z: (mu - s) / (2.0 * PI),
        w: (mu + s) / (2.0 * PI),
        c1: (lead - w * s) / norm,
        c2: (lead + w * s) / norm,
    }
}

fn principal_root(pt: &ReplicaPoint) -> Complex64 {
    Complex64::new(0.0, pt.lambda() * (2.0 * (1.0 - pt.q())).sqrt())
}

/// `Z`, `W`, `C1`, `C2` with `√(2λ²(q-1))` on the principal branch.
pub fn phi_tilde_parts(pt: ReplicaPoint) -> Result<PhiTildeParts> {
    require_open_q(&pt)?;
    Ok(parts_with_root(&pt, principal_root(&pt)))
}

fn assemble(p: &PhiTildeParts) -> Result<Complex64> {
    let half = Complex64::new(0.5, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (z, w) = (p.z, p.w);
    let zt = digamma(half + z)? - digamma(one + z)? + digamma(-z)? - digamma(half - z)?;
    let wt = digamma(half + w)? - digamma(half - w)? + digamma(-w)? - digamma(one + w)?;
    Ok(p.c1 * zt + p.c2 * wt)
}

/// `Φ̃` before the imaginary residue is dropped.
pub fn phi_tilde_complex(pt: ReplicaPoint) -> Result<Complex64> {
    assemble(&phi_tilde_parts(pt)?)
}

/// `Φ̃` with the conjugate branch `√(2λ²(q-1)) = -iλ√(2(1-q))`.
pub fn phi_tilde_conjugate_branch(pt: ReplicaPoint) -> Result<Complex64> {
    require_open_q(&pt)?;
    assemble(&parts_with_root(&pt, -principal_root(&pt)))
}

/// The digamma closed form `Φ̃(λ, q, ω)`.
pub fn phi_tilde(pt: ReplicaPoint) -> Result<f64> {
    let v = phi_tilde_complex(pt)?;
    if v.im.abs() > IMAG_RESIDUE_TOL * (1.0 + v.re.abs()) {
        return Err(Error::Domain(format!("imaginary residue {:e} in Phi-tilde = {v}", v.im)));
    }
    Ok(v.re)
}

/// Large-`λ` form of `Φ̃` from `ψ(z) ~ ln z`, with principal logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue {
    pub value: f64,
    pub imag: f64,
    pub branch_warning: bool,
}

pub fn phi_tilde_asymptotic(pt: ReplicaPoint) -> Result<AsymptoticValue> {
    let p = phi_tilde_parts(pt)?;
    let s = principal_root(&pt);
    let mu = Complex64::new(pt.lambda() * pt.q().sqrt() * pt.omega(), 0.0);
    let pi = Complex64::new(PI, 0.0);
    let ratios = [
        (pi - s + mu) / (2.0 * pi + mu - s),
        (pi - mu + s) / (-mu + s),
        (pi + mu + s) / (pi - mu - s),
        (2.0 * pi + mu + s) / (-mu - s),
    ];
    let branch_warning = ratios.iter().any(|r| !(r.norm() >= BRANCH_PROXIMITY));
    let v = p.c1 * (ratios[0].ln() - ratios[1].ln()) + p.c2 * (ratios[2].ln() - ratios[3].ln());
    Ok(AsymptoticValue {
        value: v.re,
        imag: v.im,
        branch_warning,
    })
}

/// `1/(1+x) - e^{-x}` for the Gaussian factor centred at `(2k+1)π`, with
/// `x = ((2k+1)π - λ√q ω)² / (2λ²(1-q))`.
pub fn lorentzian_gaussian_gap(pt: ReplicaPoint, k: i64) -> f64 {
    let c = (2 * k + 1) as f64 * PI - pt.mean();
    let x = c * c / (2.0 * pt.width().powi(2));
    (1.0 / (1.0 + x) - (-x).exp()).max(0.0)
}
