//! Storage capacity of a perceptron whose readout oscillates as
//! `sin(λ w·x / ‖w‖)`, the activation produced by measuring `σ_x` on the
//! output qubit of a rotation-gate quantum perceptron.
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`]: error function, Gaussian interval masses, complex digamma.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration used for the
//!   Gaussian `ω` averages.
//! * [`replica`]: the replica-symmetric single-constraint weight `Ψ`, its
//!   overlap derivative `Φ`, the free-energy functional and the saddle point.
//! * [`capacity`]: closed-form capacities and the `q → 1` consistency check.
//! * [`digamma_approx`]: the Lorentzian approximation `Φ̃` of `Φ`.
//! * [`quantum_sim`]: exact small-register simulation of the circuit.
//! * [`gardner_mc`]: Monte Carlo estimates of the Gardner volume.
//! * [`cli`]: the `sinecap` command-line front end.

pub mod capacity;
pub mod cli;
pub mod digamma_approx;
pub mod error;
pub mod gardner_mc;
pub mod quadrature;
pub mod quantum_sim;
pub mod replica;
pub mod specfun;

pub use error::{Error, Regime, Result};
