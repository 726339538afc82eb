//! Scalar special functions and standard-normal interval masses.
//!
//! Everything downstream of this module works with the standard normal
//! density `φ(z) = e^{-z²/2}/√(2π)` and its upper tail `Q(z) = ∫_z^∞ φ`.
//! Tail masses are always taken in the direction of the smaller tail so that
//! intervals far out in either tail keep full relative precision, and the
//! `ln_*` variants stay finite where the plain values underflow.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Closed interval `[lo, hi]` on the standard-normal axis. Infinite endpoints
/// are allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussInterval {
    lo: f64,
    hi: f64,
}

impl GaussInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidArgument("NaN interval bound".into()));
        }
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval bounds out of order: [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

pub fn ln_normal_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

pub fn erf(z: f64) -> f64 {
    if z.is_infinite() {
        return z.signum();
    }
    libm::erf(z)
}

pub fn erfc(z: f64) -> f64 {
    if z == f64::INFINITY {
        return 0.0;
    }
    if z == f64::NEG_INFINITY {
        return 2.0;
    }
    libm::erfc(z)
}

/// Upper tail `Q(z) = P(Z > z)` of the standard normal.
pub fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

// Past this point the log tail comes from the Mills ratio instead of erfc,
// which would underflow near z ≈ 38.
const MILLS_SWITCH: f64 = 5.0;

/// Mills ratio `Q(z)/φ(z)` by backward evaluation of its continued fraction,
/// for `z ≥ MILLS_SWITCH`.
fn mills_ratio(z: f64) -> f64 {
    let mut t = z;
    for k in (1..=120).rev() {
        t = z + k as f64 / t;
    }
    1.0 / t
}

/// `ln Q(z)`, finite for every finite `z`.
pub fn ln_upper_tail(z: f64) -> f64 {
    if z == f64::INFINITY {
        f64::NEG_INFINITY
    } else if z >= MILLS_SWITCH {
        ln_normal_pdf(z) + mills_ratio(z).ln()
    } else if z < 0.0 {
        (-upper_tail(-z)).ln_1p()
    } else {
        upper_tail(z).ln()
    }
}

/// Standard-normal probability mass of `iv`, evaluated from whichever tail
/// keeps the subtraction benign.
pub fn gauss_mass(iv: GaussInterval) -> f64 {
    let (lo, hi) = (iv.lo, iv.hi);
    if lo >= 0.0 {
        upper_tail(lo) - upper_tail(hi)
    } else if hi <= 0.0 {
        upper_tail(-hi) - upper_tail(-lo)
    } else {
        1.0 - upper_tail(-lo) - upper_tail(hi)
    }
}

/// `ln` of [`gauss_mass`], accurate where the mass itself underflows.
pub fn ln_gauss_mass(iv: GaussInterval) -> f64 {
    let (lo, hi) = (iv.lo, iv.hi);
    if lo == hi {
        return f64::NEG_INFINITY;
    }
    let tail_diff = |a: f64, b: f64| {
        // ln(Q(a) - Q(b)) for 0 <= a < b
        let la = ln_upper_tail(a);
        let lb = ln_upper_tail(b);
        la + (-(lb - la).exp()).ln_1p()
    };
    if lo >= 0.0 {
        tail_diff(lo, hi)
    } else if hi <= 0.0 {
        tail_diff(-hi, -lo)
    } else {
        (-(upper_tail(-lo) + upper_tail(hi))).ln_1p()
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

// B_{2k} / (2k) for k = 1..=8.
const DIGAMMA_ASYMPTOTIC: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

const DIGAMMA_SHIFT: f64 = 10.0;

/// Digamma `ψ(z) = Γ'(z)/Γ(z)` for complex `z`.
///
/// Shifts `z` upward with `ψ(z) = ψ(z+1) - 1/z` until `|z| ≥ 10` and
/// `Re z ≥ 0`, then sums eight terms of the Stirling series.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("digamma of {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole(z.re));
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.re < 0.0 || w.norm() < DIGAMMA_SHIFT {
        acc -= w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in DIGAMMA_ASYMPTOTIC.iter().rev() {
        series = (series + c) * inv2;
    }
    Ok(acc + w.ln() - 0.5 * inv - series)
}

/// `ln C_N`, the log surface normalization of the sphere of radius `√N` in
/// `N` dimensions.
pub fn log_sphere_surface(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("sphere dimension must be >= 1".into()));
    }
    let nf = n as f64;
    Ok(std::f64::consts::LN_2 + 0.5 * nf * std::f64::consts::PI.ln() + 0.5 * (nf - 1.0) * nf.ln()
        - ln_gamma(0.5 * nf))
}
