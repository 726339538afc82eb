//! Replica-symmetric single-constraint weight and the saddle-point relation.
//!
//! With `μ = λ√q ω` and `σ = λ√(1-q)`, the weight `Ψ(λ, q, ω)` is the
//! probability that `X ~ N(μ, σ²)` lands in `S = ∪_k [2kπ, (2k+1)π]`, i.e.
//! where `sin X > 0`. It has two representations:
//!
//! * interval form: a sum of Gaussian interval masses, one per `k`;
//! * theta series: `½ + (2/π) Σ_m e^{-σ² n²/2} sin(n μ)/n`, `n = 2m+1`.
//!
//! The series converges fast when `σ` is large and the interval sum when `σ`
//! is small. The automatic entry points ([`psi`], [`ln_psi`], [`phi`],
//! [`phi_over_psi`]) pick by `σ`. When `σ` is small `Ψ` can be far below
//! `f64::MIN_POSITIVE` inside the gaps of `S`, so `ln Ψ` and `Φ/Ψ` are
//! evaluated in the log domain there.

use std::f64::consts::PI;

use crate::error::{Error, Regime, Result};
use crate::quadrature::{integrate, Integral, QuadOptions};
use crate::specfun::{gauss_mass, ln_gauss_mass, ln_normal_pdf, normal_pdf, upper_tail, GaussInterval};

/// Hard cap on the number of terms in any truncated sum.
pub const TERM_CAP: usize = 10_000_000;

// Gaussian width σ at and above which the theta series is used.
const SERIES_MIN_WIDTH: f64 = 1.5;

/// Evaluation point `(λ, q, ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicaPoint {
    lambda: f64,
    q: f64,
    omega: f64,
}

impl ReplicaPoint {
    pub fn new(lambda: f64, q: f64, omega: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidPoint(format!("lambda must be positive and finite, got {lambda}")));
        }
        if !(0.0..1.0).contains(&q) {
            return Err(Error::InvalidPoint(format!("q must lie in [0, 1), got {q}")));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidPoint(format!("omega must be finite, got {omega}")));
        }
        Ok(Self { lambda, q, omega })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub(crate) fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    /// Mean `λ√q ω` of the Gaussian argument.
    pub fn mean(&self) -> f64 {
        self.lambda * self.q.sqrt() * self.omega
    }

    /// Standard deviation `λ√(1-q)` of the Gaussian argument.
    pub fn width(&self) -> f64 {
        self.lambda * (1.0 - self.q).sqrt()
    }
}

/// Truncation orders and tolerances. `None` truncations are chosen
/// automatically from `quad_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub k_max: Option<usize>,
    pub m_max: Option<usize>,
    pub omega_cut: f64,
    pub quad_tol: f64,
    pub psi_floor: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            k_max: None,
            m_max: None,
            omega_cut: 10.0,
            quad_tol: 1e-10,
            psi_floor: 1e-300,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega_cut", self.omega_cut), ("quad_tol", self.quad_tol), ("psi_floor", self.psi_floor)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

// ---------------------------------------------------------------------------
// interval form

fn window_z(tol: f64) -> f64 {
    (-2.0 * (tol * 1e-3).ln()).sqrt().max(9.0)
}

/// Range of `k` whose intervals carry non-negligible mass: everything within
/// `z·σ` of the mean plus one interval on each side.
fn k_window(pt: &ReplicaPoint, cfg: &SeriesConfig) -> Result<(i64, i64)> {
    if let Some(k) = cfg.k_max {
        let k = k as i64;
        return Ok((-k, k));
    }
    let z = window_z(cfg.quad_tol);
    let (mu, sigma) = (pt.mean(), pt.width());
    let lo = ((mu - z * sigma) / (2.0 * PI)).floor() - 1.0;
    let hi = ((mu + z * sigma) / (2.0 * PI)).ceil() + 1.0;
    let count = hi - lo + 1.0;
    if count > TERM_CAP as f64 {
        return Err(Error::TruncationFailure { needed: count, cap: TERM_CAP });
    }
    Ok((lo as i64, hi as i64))
}

/// `(ε₁, ε₂)` for interval `k`.
fn interval_bounds(pt: &ReplicaPoint, k: i64) -> Result<GaussInterval> {
    let (mu, sigma) = (pt.mean(), pt.width());
    let c1 = 2.0 * PI * k as f64;
    GaussInterval::new((c1 - mu) / sigma, (c1 + PI - mu) / sigma)
}

/// `Ψ` as a sum of Gaussian interval masses.
pub fn psi_interval(pt: ReplicaPoint, cfg: &SeriesConfig) -> Result<f64> {
    let (lo, hi) = k_window(&pt, cfg)?;
    let mut sum = 0.0;
    for k in lo..=hi {
        sum += gauss_mass(interval_bounds(&pt, k)?);
    }
    Ok(sum)
}

fn ln_psi_interval(pt: &ReplicaPoint, cfg: &SeriesConfig) -> Result<f64> {
    let (lo, hi) = k_window(pt, cfg)?;
    let terms = (lo..=hi)
        .map(|k| interval_bounds(pt, k).map(ln_gauss_mass))
        .collect::<Result<Vec<_>>>()?;
    Ok(log_sum_exp(&terms))
}

fn require_positive_q(pt: &ReplicaPoint) -> Result<()> {
    if pt.q <= 0.0 {
        return Err(Error::Domain("Phi is singular at q = 0".into()));
    }
    Ok(())
}

/// `∂ε/∂q` for the boundary at `c`.
fn boundary_speed(pt: &ReplicaPoint, c: f64) -> f64 {
    let sq = pt.q.sqrt();
    (c * sq - pt.lambda * pt.omega) / (2.0 * pt.lambda * sq * (1.0 - pt.q).powf(1.5))
}

/// `Σ_k [e^{ln φ(ε₂) - shift} ∂ε₂/∂q - e^{ln φ(ε₁) - shift} ∂ε₁/∂q]`
fn phi_interval_scaled(pt: &ReplicaPoint, cfg: &SeriesConfig, shift: f64) -> Result<f64> {
    require_positive_q(pt)?;
    let (lo, hi) = k_window(pt, cfg)?;
    let mut sum = 0.0;
    for k in lo..=hi {
        let iv = interval_bounds(pt, k)?;
        let c1 = 2.0 * PI * k as f64;
        let upper = (ln_normal_pdf(iv.hi()) - shift).exp() * boundary_speed(pt, c1 + PI);
        let lower = (ln_normal_pdf(iv.lo()) - shift).exp() * boundary_speed(pt, c1);
        sum += upper - lower;
    }
    Ok(sum)
}

/// `Φ = ∂Ψ/∂q` from the interval form, differentiating each boundary.
pub fn phi_interval(pt: ReplicaPoint, cfg: &SeriesConfig) -> Result<f64> {
    phi_interval_scaled(&pt, cfg, 0.0)
}

// ---------------------------------------------------------------------------
// theta series

/// Number of series terms `m = 0..len` needed so that the tail of
/// `Σ e^{-s n²/2}(a n + b + c/n)` over odd `n` is below `quad_tol`, or below
/// `quad_tol` times the first term when that term is smaller than one.
fn series_len(s: f64, a: f64, b: f64, c: f64, cfg: &SeriesConfig) -> Result<usize> {
    if let Some(m) = cfg.m_max {
        return Ok(m + 1);
    }
    // relative accuracy once the whole series is below quad_tol
    let first = (-0.5 * s).exp() * (a + b + c);
    if first == 0.0 {
        return Ok(0);
    }
    let tol = cfg.quad_tol * first.min(1.0);
    // Past the first n where the term is below tol/2 and the ratio of
    // consecutive terms is at most 1/2, the remaining tail is below tol.
    let done = |m: usize| {
        let n = (2 * m + 1) as f64;
        let term = (-0.5 * s * n * n).exp() * (a * n + b + c / n);
        let ratio = (-2.0 * s * (n + 1.0)).exp() * (n + 2.0) / n;
        term < 0.5 * tol && ratio <= 0.5
    };
    if !done(TERM_CAP) {
        let needed = (2.0 * (1.0 / tol).ln() / s).sqrt() / 2.0;
        return Err(Error::TruncationFailure { needed, cap: TERM_CAP });
    }
    let (mut lo, mut hi) = (0usize, TERM_CAP);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if done(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// `Ψ` from the theta series.
pub fn psi_series(pt: ReplicaPoint, cfg: &SeriesConfig) -> Result<f64> {
    let s = pt.width().powi(2);
    let theta = pt.mean();
    let len = series_len(s, 0.0, 0.0, 2.0 / PI, cfg)?;
    let mut sum = 0.0;
    for m in 0..len {
        let n = (2 * m + 1) as f64;
        sum += (-0.5 * s * n * n).exp() * (n * theta).sin() / n;
    }
    Ok(0.5 + 2.0 / PI * sum)
}

/// `Φ = ∂Ψ/∂q` from the term-wise differentiated theta series.
pub fn phi_series(pt: ReplicaPoint, cfg: &SeriesConfig) -> Result<f64> {
    require_positive_q(&pt)?;
    let s = pt.width().powi(2);
    let theta = pt.mean();
    let lam2 = pt.lambda * pt.lambda;
    let cos_coef = pt.lambda * pt.omega / pt.q.sqrt();
    let len = series_len(s, lam2 / PI, cos_coef.abs() / PI, 0.0, cfg)?;
    let mut sum = 0.0;
    for m in 0..len {
        let n = (2 * m + 1) as f64;
        let (sin, cos) = (n * theta).sin_cos();
        sum += (-0.5 * s * n * n).exp() * (lam2 * n * sin + cos_coef * cos);
    }
    Ok(sum / PI)
}

// ---------------------------------------------------------------------------
// automatic representation

fn prefer_series(pt: &ReplicaPoint) -> bool {
    pt.width() >= SERIES_MIN_WIDTH
}

/// `Ψ(λ, q, ω)` from whichever representation converges faster.
pub fn psi(pt: ReplicaPoint, cfg: &SeriesConfig) -> Result<f64> {
    if prefer_series(&pt) {
        psi_series(pt, cfg)
    } else {
        psi_interval(pt, cfg)
    }
}

/// `ln Ψ(λ, q, ω)`, finite even where `Ψ` underflows.
pub fn ln_psi(pt: ReplicaPoint, cfg: &SeriesConfig) -> Result<f64> {
    if prefer_series(&pt) {
        Ok(psi_series(pt, cfg)?.max(cfg.psi_floor).ln())
    } else {
        ln_psi_interval(&pt, cfg)
    }
}

/// `Φ(λ, q, ω) = ∂Ψ/∂q`.
pub fn phi(pt: ReplicaPoint, cfg: &SeriesConfig) -> Result<f64> {
    if prefer_series(&pt) {
        phi_series(pt, cfg)
    } else {
        phi_interval(pt, cfg)
    }
}

/// `Φ/Ψ`, evaluated without forming `Ψ` when it could underflow.
pub fn phi_over_psi(pt: ReplicaPoint, cfg: &SeriesConfig) -> Result<f64> {
    if prefer_series(&pt) {
        Ok(phi_series(pt, cfg)? / psi_series(pt, cfg)?.max(cfg.psi_floor))
    } else {
        let ln_psi = ln_psi_interval(&pt, cfg)?;
        phi_interval_scaled(&pt, cfg, ln_psi)
    }
}

// ---------------------------------------------------------------------------
// Gaussian averages over ω

/// `∫ Dω f(ω)` with `Dω` the standard normal measure.
///
/// The integral over `[-omega_cut, omega_cut]` is adaptive, with panel
/// breaks every quarter period of `Ψ` in `ω`. Beyond the cut, `|f|` is
/// bounded by `M ω²` with `M` sampled just outside the cut, and the resulting
/// tail bound is added to the reported error.
pub fn gaussian_average<F>(mut f: F, lambda: f64, q: f64, cfg: &SeriesConfig) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    let cut = cfg.omega_cut;
    let freq = lambda * q.sqrt();
    let mut breaks = vec![0.0];
    if freq > 0.0 {
        let step = (PI / (2.0 * freq)).max(2.0 * cut / 20_000.0);
        let n = (cut / step).floor() as i64;
        breaks.extend((1..=n).flat_map(|j| [j as f64 * step, -(j as f64) * step]));
    }

    let mut failure = None;
    let mut g = |w: f64| match f(w) {
        Ok(v) => v * normal_pdf(w),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    // effectively relative: near q = 0 at large λ, ∫ Dω Φ/Ψ is ~1e-19
    let opts = QuadOptions {
        abs_tol: cfg.quad_tol * 1e-250,
        rel_tol: cfg.quad_tol,
        max_panels: 200_000,
    };
    let body = integrate(&mut g, -cut, cut, &breaks, opts);
    if let Some(e) = failure {
        return Err(e);
    }
    let body = body?;

    let h = if freq > 0.0 { (2.0 * PI / freq / 8.0).min(0.5) } else { 0.5 };
    let mut growth: f64 = 0.0;
    for j in 0..=8 {
        let w = cut + j as f64 * h;
        for x in [w, -w] {
            growth = growth.max(f(x)?.abs() / (x * x));
        }
    }
    let tail = 2.0 * growth * (cut * normal_pdf(cut) + upper_tail(cut));
    let target = cfg.quad_tol.max(cfg.quad_tol * body.value.abs());
    if tail > target {
        return Err(Error::QuadratureNonconvergence { error: tail, target });
    }
    Ok(Integral {
        value: body.value,
        error: body.error + tail,
    })
}

fn check_lambda_q(lambda: f64, q: f64) -> Result<()> {
    ReplicaPoint::new(lambda, q, 0.0).map(|_| ())
}

/// Entropic part `½[q/(1-q) + ln(1-q)]` of the free energy.
pub fn entropic_term(q: f64) -> f64 {
    0.5 * (q / (1.0 - q) + (-q).ln_1p())
}

/// `∫ Dω ln Ψ(λ, q, ω)`.
pub fn energetic_term(lambda: f64, q: f64, cfg: &SeriesConfig) -> Result<f64> {
    check_lambda_q(lambda, q)?;
    let base = ReplicaPoint::new(lambda, q, 0.0)?;
    if q == 0.0 {
        // Ψ does not depend on ω
        return ln_psi(base, cfg);
    }
    Ok(gaussian_average(|w| ln_psi(base.with_omega(w), cfg), lambda, q, cfg)?.value)
}

/// `G(λ, α, q) = α ∫ Dω ln Ψ + ½[q/(1-q) + ln(1-q)]`.
pub fn free_energy_g(lambda: f64, alpha: f64, q: f64, cfg: &SeriesConfig) -> Result<f64> {
    check_lambda_q(lambda, q)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be nonnegative, got {alpha}")));
    }
    cfg.validate()?;
    let s = entropic_term(q);
    if alpha == 0.0 {
        return Ok(s);
    }
    Ok(alpha * energetic_term(lambda, q, cfg)? + s)
}

/// `∫ Dω Φ/Ψ` at `(λ, q)`.
pub fn phi_psi_average(lambda: f64, q: f64, cfg: &SeriesConfig) -> Result<Integral> {
    let base = ReplicaPoint::new(lambda, q, 0.0)?;
    require_positive_q(&base)?;
    gaussian_average(|w| phi_over_psi(base.with_omega(w), cfg), lambda, q, cfg)
}

/// Load `α(λ, q) = -q / (2(1-q)²) / ∫ Dω Φ/Ψ` at which `q` extremizes `G`.
pub fn alpha_of_q(lambda: f64, q: f64, cfg: &SeriesConfig) -> Result<f64> {
    let avg = phi_psi_average(lambda, q, cfg)?.value;
    if !(avg < 0.0) {
        return Err(Error::SignViolation { value: avg });
    }
    Ok(-q / (2.0 * (1.0 - q).powi(2) * avg))
}

// ---------------------------------------------------------------------------
// saddle point

/// Smallest and largest overlaps probed by the saddle-point search.
pub const Q_SEARCH_MIN: f64 = 1e-12;
pub const Q_SEARCH_MAX: f64 = 1.0 - 1e-6;

const Q_TOL: f64 = 1e-10;

fn q_scan_grid() -> Vec<f64> {
    let mut g = vec![Q_SEARCH_MIN, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 0.01, 0.02, 0.05];
    g.extend((1..=9).map(|i| i as f64 / 10.0));
    g.extend((5..=24).map(|i| 1.0 - 10f64.powf(-(i as f64) / 4.0)));
    g
}

fn bisect_root(lambda: f64, alpha: f64, mut a: f64, mut b: f64, fa: f64, cfg: &SeriesConfig) -> Result<f64> {
    let mut fa_sign = fa > 0.0;
    // absolute tolerance, tightened to relative for roots far below it
    while b - a > Q_TOL.min(1e-6 * b) {
        let m = 0.5 * (a + b);
        let fm = alpha_of_q(lambda, m, cfg)? - alpha;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == fa_sign {
            a = m;
            fa_sign = fm > 0.0;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn saddle_search(lambda: f64, alpha: f64, cfg: &SeriesConfig, first_only: bool) -> Result<Vec<f64>> {
    check_lambda_q(lambda, 0.0)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let grid = q_scan_grid();
    let mut roots = Vec::new();
    let mut min_val = f64::INFINITY;
    let mut prev: Option<(f64, f64)> = None;
    for &q in &grid {
        let f = alpha_of_q(lambda, q, cfg)? - alpha;
        min_val = min_val.min(f);
        if let Some((qp, fp)) = prev {
            if f == 0.0 {
                roots.push(q);
            } else if fp != 0.0 && (fp > 0.0) != (f > 0.0) {
                roots.push(bisect_root(lambda, alpha, qp, q, fp, cfg)?);
            }
        } else if f == 0.0 {
            roots.push(q);
        }
        if first_only && !roots.is_empty() {
            break;
        }
        prev = Some((q, f));
    }
    if roots.is_empty() {
        let regime = if min_val > 0.0 { Regime::BelowRange } else { Regime::AboveRange };
        return Err(Error::NoBracket { lambda, alpha, regime });
    }
    Ok(roots)
}

/// Overlap `q*` solving `α(λ, q*) = α`, to `1e-10` in `q` (relative `1e-6`
/// for roots below `1e-4`).
///
/// Scans `q` upward from `Q_SEARCH_MIN` toward `Q_SEARCH_MAX` and bisects the
/// first sign change. When `α(λ, ·)` crosses `α` more than once the smallest
/// root is returned; [`saddle_roots`] lists them all.
pub fn saddle_q(lambda: f64, alpha: f64, cfg: &SeriesConfig) -> Result<f64> {
    Ok(saddle_search(lambda, alpha, cfg, true)?[0])
}

/// Every root of `α(λ, q) = α` bracketed by the scan, in increasing `q`.
pub fn saddle_roots(lambda: f64, alpha: f64, cfg: &SeriesConfig) -> Result<Vec<f64>> {
    saddle_search(lambda, alpha, cfg, false)
}
