//! Exact simulation of the single-output quantum perceptron.
//!
//! Qubit basis order is `{|-1⟩, |1⟩}` throughout, with `σ_z = diag(-1, 1)`,
//! `σ_x = [[0, 1], [1, 0]]` and `σ_y = [[0, -i], [i, 0]]`. The rotation
//! `exp(-iθσ_y/2) = [[c, -s], [s, c]]` (`c, s = cos θ/2, sin θ/2`) takes
//! `|-1⟩` to `c|-1⟩ + s|1⟩`.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Largest input register simulated densely.
pub const MAX_DENSE_QUBITS: usize = 12;

const STATE_TOL: f64 = 1e-12;

/// Input pattern `x ∈ {±1}^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryPattern {
    bits: Vec<i8>,
}

impl BinaryPattern {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidArgument("pattern must have at least one entry".into()));
        }
        if let Some(b) = bits.iter().find(|&&b| b != 1 && b != -1) {
            return Err(Error::InvalidArgument(format!("pattern entries must be +1 or -1, got {b}")));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Computational-basis index, bit `j` set when entry `j` is `+1`.
    pub fn basis_index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .fold(0, |acc, (j, _)| acc | (1 << j))
    }
}

/// Weight vector with its cached Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
    norm: f64,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite".into()));
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("weight vector must be nonzero".into()));
        }
        Ok(Self { w, norm })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn dot(&self, x: &BinaryPattern) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: {} weights, {} pattern entries",
                self.w.len(),
                x.len()
            )));
        }
        Ok(self.w.iter().zip(&x.bits).map(|(w, &b)| w * b as f64).sum())
    }
}

/// Output-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputQubitState {
    rho: [[Complex64; 2]; 2],
}

impl OutputQubitState {
    /// Validates Hermiticity, unit trace and positivity to `1e-12`.
    pub fn new(rho: [[Complex64; 2]; 2]) -> Result<Self> {
        let herm = (rho[0][1] - rho[1][0].conj()).norm().max(rho[0][0].im.abs()).max(rho[1][1].im.abs());
        if herm > STATE_TOL {
            return Err(Error::InvalidArgument(format!("density matrix not Hermitian (residue {herm:e})")));
        }
        let trace = rho[0][0].re + rho[1][1].re;
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidArgument(format!("density matrix trace {trace}")));
        }
        let state = Self { rho };
        let min_eig = state.min_eigenvalue();
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidArgument(format!("density matrix has eigenvalue {min_eig}")));
        }
        Ok(state)
    }

    fn from_real(a: f64, off: f64, d: f64) -> Result<Self> {
        let c = |v| Complex64::new(v, 0.0);
        Self::new([[c(a), c(off)], [c(off), c(d)]])
    }

    pub fn rho(&self) -> [[Complex64; 2]; 2] {
        self.rho
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (a, d) = (self.rho[0][0].re, self.rho[1][1].re);
        0.5 * (a + d) - (0.25 * (a - d).powi(2) + self.rho[0][1].norm_sqr()).sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_entry_gap(&self, other: &Self) -> f64 {
        let mut gap: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                gap = gap.max((self.rho[i][j] - other.rho[i][j]).norm());
            }
        }
        gap
    }
}

fn heaviside(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Output of the Θ-gate: `|1⟩⟨1|` if `w·x > 0`, `|-1⟩⟨-1|` otherwise.
pub fn output_state_theta(w: &WeightVector, x: &BinaryPattern) -> Result<OutputQubitState> {
    let t = heaviside(w.dot(x)?);
    OutputQubitState::from_real(1.0 - t, 0.0, t)
}

/// Rotation angle `θ = λ (w·x) / ‖w‖` of the λ-gate.
pub fn rotation_angle(w: &WeightVector, x: &BinaryPattern, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    Ok(lambda * w.dot(x)? / w.norm())
}

/// Closed-form output of the λ-gate:
/// `[[cos²(θ/2), sin θ / 2], [sin θ / 2, sin²(θ/2)]]`.
pub fn output_state_lambda(w: &WeightVector, x: &BinaryPattern, lambda: f64) -> Result<OutputQubitState> {
    let theta = rotation_angle(w, x, lambda)?;
    let (s, c) = (0.5 * theta).sin_cos();
    OutputQubitState::from_real(c * c, s * c, s * s)
}

/// Applies `U = exp(-(i/2)(λ/‖w‖) Σ_j w_j σ_z^{(j)} ⊗ σ_y)` to `|x⟩ ⊗ |-1⟩`
/// on the full `2^{N+1}` state vector and traces out the input register.
///
/// Amplitudes are indexed `(y << 1) | out`. `U` is block diagonal over the
/// input basis strings `y`, acting on each block as a `σ_y` rotation by
/// `λ (w·y)/‖w‖`.
pub fn full_circuit_output(w: &WeightVector, x: &BinaryPattern, lambda: f64) -> Result<OutputQubitState> {
    let n = x.len();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::DimensionCap { n, cap: MAX_DENSE_QUBITS });
    }
    if w.len() != n {
        return Err(Error::InvalidArgument(format!("dimension mismatch: {} weights, {n} pattern entries", w.len())));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let dim = 1usize << (n + 1);
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[x.basis_index() << 1] = Complex64::new(1.0, 0.0);

    for y in 0..(1usize << n) {
        let field: f64 = (0..n)
            .map(|j| if y >> j & 1 == 1 { w.w[j] } else { -w.w[j] })
            .sum();
        let (s, c) = (0.5 * lambda * field / w.norm()).sin_cos();
        let (lo, hi) = (psi[y << 1], psi[y << 1 | 1]);
        psi[y << 1] = c * lo - s * hi;
        psi[y << 1 | 1] = s * lo + c * hi;
    }

    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for y in 0..(1usize << n) {
        for a in 0..2 {
            for b in 0..2 {
                rho[a][b] += psi[y << 1 | a] * psi[y << 1 | b].conj();
            }
        }
    }
    OutputQubitState::new(rho)
}

/// Pauli axis for [`expect_pauli`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `tr(ρ σ_axis)`.
pub fn expect_pauli(rho: &OutputQubitState, axis: Axis) -> f64 {
    let r = rho.rho;
    match axis {
        Axis::X => (r[0][1] + r[1][0]).re,
        Axis::Y => (Complex64::i() * (r[0][1] - r[1][0])).re,
        Axis::Z => (r[1][1] - r[0][0]).re,
    }
}

/// Activation of the general single-layer gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Heaviside,
    Sigmoid,
    Relu,
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "heaviside" => Ok(Self::Heaviside),
            "sigmoid" => Ok(Self::Sigmoid),
            "relu" => Ok(Self::Relu),
            other => Err(Error::UnsupportedActivation(other.to_string())),
        }
    }
}

/// General gate `R_y(2 arcsin √f(w·x))` on `|-1⟩`, giving
/// `[[1-f, √(f(1-f))], [√(f(1-f)), f]]`. Only the zero-bias Heaviside
/// activation is supported, for which this is [`output_state_theta`].
pub fn theta_gate_output_generic(w: &WeightVector, x: &BinaryPattern, f: Activation) -> Result<OutputQubitState> {
    let act = match f {
        Activation::Heaviside => heaviside,
        other => return Err(Error::UnsupportedActivation(format!("{other:?}"))),
    };
    let p = act(w.dot(x)?);
    OutputQubitState::from_real(1.0 - p, (p * (1.0 - p)).sqrt(), p)
}

/// Result of [`verify_circuit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitReport {
    pub n: usize,
    pub cases: usize,
    pub max_entry_gap: f64,
    pub max_sigma_x_gap: f64,
}

/// Compares [`full_circuit_output`] with [`output_state_lambda`] and the
/// `⟨σ_x⟩ = sin θ` identity on `cases` random `(w, x, λ)` at dimension `n`.
pub fn verify_circuit(n: usize, cases: usize, seed: u64) -> Result<CircuitReport> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::DimensionCap { n, cap: MAX_DENSE_QUBITS });
    }
    if cases == 0 {
        return Err(Error::InvalidArgument("cases must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut gap, mut sx_gap) = (0.0f64, 0.0f64);
    for _ in 0..cases {
        let w = WeightVector::new((0..n).map(|_| rng.sample(StandardNormal)).collect())?;
        let x = BinaryPattern::new((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())?;
        let lambda = rng.random_range(0.0..4.0 * std::f64::consts::PI);
        let full = full_circuit_output(&w, &x, lambda)?;
        let closed = output_state_lambda(&w, &x, lambda)?;
        gap = gap.max(full.max_entry_gap(&closed));
        let theta = rotation_angle(&w, &x, lambda)?;
        sx_gap = sx_gap.max((expect_pauli(&full, Axis::X) - theta.sin()).abs());
    }
    Ok(CircuitReport {
        n,
        cases,
        max_entry_gap: gap,
        max_sigma_x_gap: sx_gap,
    })
}
