//! Monte Carlo estimates of the Gardner volume
//! `V = P_w[ξ^μ sin(λ w·x^μ/‖w‖) > 0 for all μ]` with `w` uniform on the
//! sphere.
//!
//! Randomness is counter based: one ChaCha8 key per user seed, and a
//! separate ChaCha stream for each pattern set, weight sample or trial, so
//! results do not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum_sim::WeightVector;

const DOMAIN_PATTERNS: u64 = 1;
const DOMAIN_WEIGHTS: u64 = 2;
const DOMAIN_WALKERS: u64 = 3;

fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(domain << 56 | (index & ((1 << 56) - 1)));
    rng
}

fn coin(rng: &mut ChaCha8Rng) -> i8 {
    if rng.random::<bool>() {
        1
    } else {
        -1
    }
}

/// `p` patterns in `{±1}^N` with labels in `{±1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    n: usize,
    patterns: Vec<i8>,
    labels: Vec<i8>,
}

impl PatternSet {
    /// Row-major `p × n` patterns and `p` labels.
    pub fn new(n: usize, patterns: Vec<i8>, labels: Vec<i8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be >= 1".into()));
        }
        if patterns.len() != n * labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} pattern entries do not form {} rows of length {n}",
                patterns.len(),
                labels.len()
            )));
        }
        if patterns.iter().chain(&labels).any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidArgument("pattern entries and labels must be +1 or -1".into()));
        }
        Ok(Self { n, patterns, labels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.labels.len()
    }

    pub fn pattern(&self, mu: usize) -> &[i8] {
        &self.patterns[mu * self.n..(mu + 1) * self.n]
    }

    pub fn label(&self, mu: usize) -> i8 {
        self.labels[mu]
    }

    /// The first `p` patterns.
    pub fn prefix(&self, p: usize) -> PatternSet {
        let p = p.min(self.p());
        PatternSet {
            n: self.n,
            patterns: self.patterns[..p * self.n].to_vec(),
            labels: self.labels[..p].to_vec(),
        }
    }

    /// Every pattern and label negated.
    pub fn negated(&self) -> PatternSet {
        PatternSet {
            n: self.n,
            patterns: self.patterns.iter().map(|v| -v).collect(),
            labels: self.labels.iter().map(|v| -v).collect(),
        }
    }
}

fn patterns_from_stream(n: usize, p: usize, seed: u64, index: u64) -> Result<PatternSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let mut rng = stream_rng(seed, DOMAIN_PATTERNS, index);
    let mut patterns = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(p);
    // pattern by pattern, so a smaller p yields a prefix of a larger one
    for _ in 0..p {
        patterns.extend((0..n).map(|_| coin(&mut rng)));
        labels.push(coin(&mut rng));
    }
    PatternSet::new(n, patterns, labels)
}

/// I.i.d. uniform `±1` patterns and labels.
pub fn sample_patterns(n: usize, p: usize, seed: u64) -> Result<PatternSet> {
    patterns_from_stream(n, p, seed, 0)
}

fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn sphere_from_stream(n: usize, seed: u64, index: u64) -> Result<WeightVector> {
    let mut rng = stream_rng(seed, DOMAIN_WEIGHTS, index);
    loop {
        let g = gaussian_vector(n, &mut rng);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            let scale = (n as f64).sqrt() / norm;
            return WeightVector::new(g.into_iter().map(|v| v * scale).collect());
        }
    }
}

/// Uniform weight on the sphere of radius `√N`.
pub fn sample_sphere_weight(n: usize, seed: u64) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    sphere_from_stream(n, seed, 0)
}

fn stability(w: &[f64], norm: f64, x: &[i8], label: i8, lambda: f64) -> bool {
    let h: f64 = w.iter().zip(x).map(|(a, &b)| a * b as f64).sum();
    label as f64 * (lambda * h / norm).sin() > 0.0
}

/// Number of leading patterns `w` satisfies before the first violation.
fn satisfied_prefix(w: &WeightVector, ps: &PatternSet, lambda: f64) -> usize {
    (0..ps.p())
        .position(|mu| !stability(w.weights(), w.norm(), ps.pattern(mu), ps.label(mu), lambda))
        .unwrap_or(ps.p())
}

/// True iff `ξ^μ sin(λ w·x^μ/‖w‖) > 0` for every pattern (ties fail).
pub fn satisfies_all(w: &WeightVector, ps: &PatternSet, lambda: f64) -> Result<bool> {
    if w.len() != ps.n() {
        return Err(Error::InvalidArgument(format!("weight length {} != N = {}", w.len(), ps.n())));
    }
    Ok(satisfied_prefix(w, ps, lambda) == ps.p())
}

/// Hit-or-miss volume fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub fraction: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl VolumeEstimate {
    fn from_hits(hits: usize, samples: usize, seed: u64) -> Self {
        let fraction = hits as f64 / samples as f64;
        Self {
            fraction,
            stderr: (fraction * (1.0 - fraction) / samples as f64).sqrt(),
            samples,
            seed,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    Ok(())
}

/// Per-sample satisfied prefix lengths for `samples` uniform weights.
fn prefix_lengths(ps: &PatternSet, lambda: f64, samples: usize, seed: u64) -> Result<Vec<usize>> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| Ok(satisfied_prefix(&sphere_from_stream(ps.n(), seed, i)?, ps, lambda)))
        .collect()
}

/// Fraction of `samples` uniform sphere weights satisfying every pattern.
pub fn estimate_volume(ps: &PatternSet, lambda: f64, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    check_lambda(lambda)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let hits = prefix_lengths(ps, lambda, samples, seed)?
        .into_iter()
        .filter(|&k| k == ps.p())
        .count();
    Ok(VolumeEstimate::from_hits(hits, samples, seed))
}

/// Log volume and survival after each constraint of a sequential run.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialEstimate {
    /// `ln V̂` after the first `p` constraints, `p = 0..=P`; `-∞` once no walker survives.
    pub log_fraction: Vec<f64>,
    pub walkers: usize,
    pub sweeps: usize,
}

impl SequentialEstimate {
    pub fn survived(&self, p: usize) -> bool {
        self.log_fraction[p] > f64::NEG_INFINITY
    }
}

struct Walkers {
    n: usize,
    w: Vec<f64>,
    norm2: Vec<f64>,
    // fields h_μ = w·x^μ, row per walker, stride P
    h: Vec<f64>,
    stride: usize,
}

impl Walkers {
    fn len(&self) -> usize {
        self.norm2.len()
    }

    fn margin(&self, k: usize, mu: usize, ps: &PatternSet, lambda: f64) -> f64 {
        ps.label(mu) as f64 * (lambda * self.h[k * self.stride + mu] / self.norm2[k].sqrt()).sin()
    }

    fn resample(&mut self, alive: &[usize], active: usize, rng: &mut ChaCha8Rng) {
        let (n, stride) = (self.n, self.stride);
        let picks: Vec<usize> = (0..self.len()).map(|_| alive[rng.random_range(0..alive.len())]).collect();
        let (w, norm2, h) = (self.w.clone(), self.norm2.clone(), self.h.clone());
        for (k, &src) in picks.iter().enumerate() {
            self.w[k * n..(k + 1) * n].copy_from_slice(&w[src * n..(src + 1) * n]);
            self.norm2[k] = norm2[src];
            self.h[k * stride..k * stride + active].copy_from_slice(&h[src * stride..src * stride + active]);
        }
    }

    /// Single-coordinate Metropolis sweeps under the Gaussian weight,
    /// restricted to margins `> 0` on patterns before `active - 1` and
    /// `> threshold` on pattern `active - 1`.
    #[allow(clippy::too_many_arguments)]
    fn sweep(
        &mut self,
        ps: &PatternSet,
        active: usize,
        threshold: f64,
        lambda: f64,
        sweeps: usize,
        step: &mut f64,
        rng: &mut ChaCha8Rng,
    ) {
        let (n, stride) = (self.n, self.stride);
        let mut hn = vec![0.0; active];
        for _ in 0..sweeps {
            let (mut tried, mut accepted) = (0usize, 0usize);
            for k in 0..self.len() {
                for i in 0..n {
                    tried += 1;
                    let delta: f64 = *step * rng.sample::<f64, _>(StandardNormal);
                    let wi = self.w[k * n + i];
                    let wi_new = wi + delta;
                    let log_ratio = -0.5 * (wi_new * wi_new - wi * wi);
                    if log_ratio < 0.0 && rng.random::<f64>() >= log_ratio.exp() {
                        continue;
                    }
                    let norm2_new = self.norm2[k] - wi * wi + wi_new * wi_new;
                    if !(norm2_new > 0.0) {
                        continue;
                    }
                    let norm = norm2_new.sqrt();
                    let row = &self.h[k * stride..k * stride + active];
                    let ok = (0..active).all(|nu| {
                        hn[nu] = row[nu] + delta * ps.pattern(nu)[i] as f64;
                        let bar = if nu + 1 == active { threshold } else { 0.0 };
                        ps.label(nu) as f64 * (lambda * hn[nu] / norm).sin() > bar
                    });
                    if ok {
                        accepted += 1;
                        self.w[k * n + i] = wi_new;
                        self.norm2[k] = norm2_new;
                        self.h[k * stride..k * stride + active].copy_from_slice(&hn);
                    }
                }
            }
            let rate = accepted as f64 / tried as f64;
            if rate > 0.5 {
                *step = (*step * 1.5).min(3.0);
            } else if rate < 0.2 {
                *step = (*step / 1.5).max(1e-9);
            }
        }
    }
}

/// Largest number of splitting levels spent on one constraint.
const MAX_LEVELS: usize = 200;

/// Sequential population estimate of the volume for every prefix of `ps`.
///
/// `walkers` Gaussian weights (uniform in direction) face the constraints
/// one at a time. Each constraint is approached by adaptive multilevel
/// splitting on its margin `ξ sin(λ w·x/‖w‖)`: the threshold rises in
/// levels that each keep about half of the population, down to the final
/// threshold 0. After every level the kept fraction multiplies `V̂`, the
/// kept walkers are resampled back to full size, and `sweeps` rounds of
/// single-coordinate Metropolis moves decorrelate them without leaving the
/// current feasible set. Every survivor satisfies all constraints so far,
/// so a positive estimate certifies a nonempty solution set.
pub fn estimate_volume_sequential(
    ps: &PatternSet,
    lambda: f64,
    walkers: usize,
    sweeps: usize,
    seed: u64,
    stream: u64,
) -> Result<SequentialEstimate> {
    check_lambda(lambda)?;
    if walkers == 0 {
        return Err(Error::InvalidArgument("walkers must be >= 1".into()));
    }
    let (n, pmax) = (ps.n(), ps.p());
    let mut rng = stream_rng(seed, DOMAIN_WALKERS, stream);
    let mut pop = Walkers {
        n,
        w: Vec::with_capacity(walkers * n),
        norm2: Vec::with_capacity(walkers),
        h: vec![0.0; walkers * pmax],
        stride: pmax,
    };
    for _ in 0..walkers {
        let g = gaussian_vector(n, &mut rng);
        pop.norm2.push(g.iter().map(|v| v * v).sum());
        pop.w.extend(g);
    }
    let keep = walkers.div_ceil(2);
    let mut log_fraction = vec![f64::NEG_INFINITY; pmax + 1];
    log_fraction[0] = 0.0;
    let mut log_v = 0.0;
    let mut step = 1.0f64;

    'constraints: for mu in 0..pmax {
        let x = ps.pattern(mu);
        for k in 0..walkers {
            let wk = &pop.w[k * n..(k + 1) * n];
            pop.h[k * pop.stride + mu] = wk.iter().zip(x).map(|(a, &b)| a * b as f64).sum();
        }
        let mut level = 0;
        loop {
            let margins: Vec<f64> = (0..walkers).map(|k| pop.margin(k, mu, ps, lambda)).collect();
            let positive = margins.iter().filter(|m| **m > 0.0).count();
            let threshold = if positive >= keep || level == MAX_LEVELS {
                0.0
            } else {
                let mut sorted = margins.clone();
                sorted.sort_by(f64::total_cmp);
                sorted[walkers - keep]
            };
            let alive: Vec<usize> = (0..walkers).filter(|&k| margins[k] > threshold).collect();
            if alive.is_empty() {
                break 'constraints;
            }
            log_v += (alive.len() as f64 / walkers as f64).ln();
            let last = threshold == 0.0;
            if last && mu + 1 == pmax {
                log_fraction[mu + 1] = log_v;
                break 'constraints;
            }
            pop.resample(&alive, mu + 1, &mut rng);
            pop.sweep(ps, mu + 1, threshold, lambda, sweeps, &mut step, &mut rng);
            if last {
                log_fraction[mu + 1] = log_v;
                break;
            }
            level += 1;
        }
    }
    Ok(SequentialEstimate {
        log_fraction,
        walkers,
        sweeps,
    })
}

/// Volume estimator used by [`capacity_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Uniform sampling of `samples` weights per trial.
    HitOrMiss,
    /// Sequential population run with `samples` walkers and the given
    /// number of Metropolis sweeps per constraint.
    Sequential { sweeps: usize },
}

/// One row of [`capacity_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub alpha: f64,
    pub p: usize,
    /// Fraction of trials whose volume estimate is positive.
    pub fraction_positive: f64,
    /// Mean `ln V̂` over trials with a positive estimate (`NaN` if none).
    pub mean_log_fraction: f64,
    /// Quartiles of the per-trial volume estimates.
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
}

fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let pos = prob * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-trial `ln V̂` for every prefix `p = 0..=pmax` of trial `t`'s patterns.
pub fn trial_log_volumes(
    n: usize,
    lambda: f64,
    pmax: usize,
    samples: usize,
    seed: u64,
    trial: u64,
    estimator: Estimator,
) -> Result<Vec<f64>> {
    let ps = patterns_from_stream(n, pmax, seed, trial)?;
    match estimator {
        Estimator::HitOrMiss => {
            let lens = prefix_lengths(&ps, lambda, samples, seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15))?;
            let mut count = vec![0usize; pmax + 2];
            for k in lens {
                count[k] += 1;
            }
            // survivors of prefix p are samples whose first failure is at index >= p
            let mut out = vec![0.0; pmax + 1];
            let mut tail = 0usize;
            for p in (0..=pmax).rev() {
                tail += count[p];
                out[p] = (tail as f64 / samples as f64).ln();
            }
            Ok(out)
        }
        Estimator::Sequential { sweeps } => {
            Ok(estimate_volume_sequential(&ps, lambda, samples, sweeps, seed, trial)?.log_fraction)
        }
    }
}

/// For each `α`, `p = round(αN)` patterns in `trials` independent trials.
///
/// Patterns are nested: one set of `max p` patterns per trial supplies every
/// `α`, so the fraction of positive trials cannot increase with `α`. Trial
/// `t` uses the same patterns for every `λ` under the same seed.
pub fn capacity_scan(
    n: usize,
    lambda: f64,
    alpha_grid: &[f64],
    trials: usize,
    samples: usize,
    seed: u64,
    estimator: Estimator,
) -> Result<Vec<ScanRow>> {
    check_lambda(lambda)?;
    if n == 0 || trials == 0 || samples == 0 {
        return Err(Error::InvalidArgument("N, trials and samples must be >= 1".into()));
    }
    if alpha_grid.is_empty() || alpha_grid.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidArgument("alpha grid must be nonempty and positive".into()));
    }
    let ps: Vec<usize> = alpha_grid.iter().map(|a| (a * n as f64).round() as usize).collect();
    let pmax = *ps.iter().max().expect("nonempty grid");
    let logs = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_log_volumes(n, lambda, pmax, samples, seed, t, estimator))
        .collect::<Result<Vec<_>>>()?;

    Ok(alpha_grid
        .iter()
        .zip(&ps)
        .map(|(&alpha, &p)| {
            let per_trial: Vec<f64> = logs.iter().map(|l| l[p]).collect();
            let positive: Vec<f64> = per_trial.iter().copied().filter(|v| *v > f64::NEG_INFINITY).collect();
            let mut fractions: Vec<f64> = per_trial.iter().map(|v| v.exp()).collect();
            fractions.sort_by(f64::total_cmp);
            ScanRow {
                alpha,
                p,
                fraction_positive: positive.len() as f64 / trials as f64,
                mean_log_fraction: if positive.is_empty() {
                    f64::NAN
                } else {
                    positive.iter().sum::<f64>() / positive.len() as f64
                },
                q25: quantile(&fractions, 0.25),
                q50: quantile(&fractions, 0.5),
                q75: quantile(&fractions, 0.75),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_sampling() {
        let empty = sample_patterns(5, 0, 1).unwrap();
        assert_eq!(empty.p(), 0);
        let a = sample_patterns(100, 10_000, 9).unwrap();
        assert_eq!(a, sample_patterns(100, 10_000, 9).unwrap());
        let mean = a.patterns.iter().map(|&v| v as f64).sum::<f64>() / 1e6;
        assert!(mean.abs() < 4.0 / 1e3, "{mean}");
        // nested prefixes
        assert_eq!(sample_patterns(7, 5, 3).unwrap(), sample_patterns(7, 9, 3).unwrap().prefix(5));
    }

    #[test]
    fn sphere_weights() {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        let draws = 100_000;
        for i in 0..draws {
            let w = sphere_from_stream(3, 11, i).unwrap();
            assert!((w.norm() * w.norm() - 3.0).abs() < 1e-10);
            m1 += w.weights()[0];
            m2 += w.weights()[0].powi(2);
        }
        let (m1, m2) = (m1 / draws as f64, m2 / draws as f64);
        // on the radius-√3 sphere, w₁ has mean 0, variance 1 and E[w₁⁴] = 9/5
        assert!(m1.abs() < 4.0 / (draws as f64).sqrt(), "{m1}");
        assert!((m2 - 1.0).abs() < 4.0 * (0.8f64 / draws as f64).sqrt(), "{m2}");
    }

    #[test]
    fn second_moment_angular_grid_oracle() {
        // E[w₁²] on the radius-√3 sphere by a midpoint grid in (θ, φ)
        let (nt, np) = (1000, 1000);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..nt {
            let t = (i as f64 + 0.5) * std::f64::consts::PI / nt as f64;
            for j in 0..np {
                let f = (j as f64 + 0.5) * 2.0 * std::f64::consts::PI / np as f64;
                let w1 = 3f64.sqrt() * t.sin() * f.cos();
                num += w1 * w1 * t.sin();
                den += t.sin();
            }
        }
        assert!((num / den - 1.0).abs() < 1e-5);
    }

    #[test]
    fn satisfies_examples() {
        let w = sample_sphere_weight(4, 2).unwrap();
        assert!(satisfies_all(&w, &sample_patterns(4, 0, 1).unwrap(), 3.0).unwrap());
        for seed in 0..10_000u64 {
            let ps = sample_patterns(5, 3, seed).unwrap();
            let w = sphere_from_stream(5, seed, 1).unwrap();
            let classical = (0..3).all(|mu| {
                let h: f64 = w.weights().iter().zip(ps.pattern(mu)).map(|(a, &b)| a * b as f64).sum();
                ps.label(mu) as f64 * h > 0.0
            });
            assert_eq!(satisfies_all(&w, &ps, 1e-6).unwrap(), classical);
            assert_eq!(satisfies_all(&w, &ps.negated(), 2.7).unwrap(), satisfies_all(&w, &ps, 2.7).unwrap());
        }
    }

    #[test]
    fn volume_examples() {
        let v = estimate_volume(&sample_patterns(4, 0, 1).unwrap(), 1.0, 100, 5).unwrap();
        assert_eq!((v.fraction, v.stderr), (1.0, 0.0));
        let v = estimate_volume(&sample_patterns(2, 1, 4).unwrap(), 1e-6, 100_000, 5).unwrap();
        assert!((v.fraction - 0.5).abs() < 4.0 * v.stderr, "{v:?}");
        assert!(estimate_volume(&sample_patterns(2, 1, 4).unwrap(), 1e-6, 0, 5).is_err());
    }

    #[test]
    fn volume_matches_angular_grid() {
        let ps = sample_patterns(3, 2, 21).unwrap();
        let lambda = 2.0;
        let est = estimate_volume(&ps, lambda, 200_000, 8).unwrap();
        // exact fraction of the 2-sphere by a 1000 × 1000 grid in (cos θ, φ), equal-area cells
        let (nu, np) = (1000, 1000);
        let mut hits = 0usize;
        for i in 0..nu {
            let u = -1.0 + (i as f64 + 0.5) * 2.0 / nu as f64;
            let s = (1.0 - u * u).sqrt();
            for j in 0..np {
                let f = (j as f64 + 0.5) * 2.0 * std::f64::consts::PI / np as f64;
                let w = WeightVector::new(vec![s * f.cos(), s * f.sin(), u]).unwrap();
                hits += satisfies_all(&w, &ps, lambda).unwrap() as usize;
            }
        }
        let grid = hits as f64 / (nu * np) as f64;
        assert!((est.fraction - grid).abs() < 4.0 * est.stderr + 2e-3, "{} vs {grid}", est.fraction);
    }

    #[test]
    fn nested_fraction_monotone() {
        let ps = sample_patterns(6, 12, 2).unwrap();
        let mut prev = 1.0;
        for p in 0..=12 {
            let v = estimate_volume(&ps.prefix(p), 3.0, 5_000, 17).unwrap().fraction;
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn determinism_across_thread_counts() {
        let ps = sample_patterns(8, 6, 1).unwrap();
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = serial.install(|| estimate_volume(&ps, 2.0, 10_000, 3).unwrap());
        let b = wide.install(|| estimate_volume(&ps, 2.0, 10_000, 3).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn sequential_survivors_are_solutions() {
        let ps = sample_patterns(10, 25, 5).unwrap();
        let est = estimate_volume_sequential(&ps, 4.0, 200, 3, 1, 0).unwrap();
        assert_eq!(est.log_fraction.len(), 26);
        assert!(est.log_fraction.windows(2).all(|w| w[1] <= w[0]));
        // one constraint removes about half the walkers
        assert!((est.log_fraction[1] - 0.5f64.ln()).abs() < 0.3);
    }

    #[test]
    fn sequential_tracks_hit_or_miss() {
        // small p: both estimators see the same volume
        let ps = sample_patterns(6, 5, 12).unwrap();
        let hm = estimate_volume(&ps, 3.0, 400_000, 2).unwrap();
        let runs: Vec<f64> = (0..8)
            .map(|s| estimate_volume_sequential(&ps, 3.0, 4000, 5, 100 + s, 0).unwrap().log_fraction[5].exp())
            .collect();
        let mean = runs.iter().sum::<f64>() / runs.len() as f64;
        assert!((mean - hm.fraction).abs() < 0.1 * hm.fraction, "{mean} vs {}", hm.fraction);
    }

    #[test]
    fn scan_small_alpha_all_positive() {
        let rows = capacity_scan(16, 1e-6, &[0.25], 10, 2000, 7, Estimator::HitOrMiss).unwrap();
        assert_eq!(rows[0].p, 4);
        assert_eq!(rows[0].fraction_positive, 1.0);
    }

    #[test]
    fn scan_rows_monotone() {
        let alphas: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
        for est in [Estimator::HitOrMiss, Estimator::Sequential { sweeps: 2 }] {
            let rows = capacity_scan(8, 1e-6, &alphas, 6, 300, 3, est).unwrap();
            assert!(rows.windows(2).all(|w| w[1].fraction_positive <= w[0].fraction_positive));
        }
    }
}
