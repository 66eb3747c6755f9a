//! Eigenvalue sampling, phase-estimation sampling and average-eigenvalue
//! estimation for small quantum instances, together with the clock-Hamiltonian
//! constructions that reduce bounded-error quantum decision problems to them.
//!
//! Everything runs on dense state vectors and matrices, so the intended scale
//! is a handful of qubits. The [`oracle`] module provides exact reference
//! distributions and the `(ε, δ)`-approximation check used to validate the
//! samplers.

pub mod average;
pub mod circuit;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod oracle;
pub mod phase;
pub mod random;
pub mod reductions;
pub mod rng;
pub mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64;
