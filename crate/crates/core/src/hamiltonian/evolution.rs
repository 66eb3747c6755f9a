//! Scaling, Trotterized `e^{2πiH′}` and eigenvalue sampling through phase estimation.

use std::f64::consts::TAU;

use rand::Rng;

use super::{LocalHamiltonian, LocalTerm};
use crate::circuit::{BasisLabel, Circuit, Gate, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{exp_i_hermitian, operator_norm};
use crate::phase::{DensePowers, EstimatorConfig, PhaseDistribution, SamplingRequest};

/// Scale factor `Λ` and the rescaled Hamiltonian `H′ = H/Λ`, whose spectrum
/// lies strictly inside `(−1/4, 1/4)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleInfo {
    pub lambda_cap: f64,
    pub scaled: LocalHamiltonian,
}

/// An eigenvalue estimate in the units of the unscaled Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueSample {
    pub lambda_est: f64,
}

/// `Λ = 4·Σ_j‖H_j‖·(1 + 1e−9)`; a Hamiltonian whose terms are all zero gets `Λ = 1`.
pub fn scale_hamiltonian(h: &LocalHamiltonian) -> Result<ScaleInfo> {
    if h.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    let bound = h.norm_bound();
    let lambda_cap = if bound > 0.0 { 4.0 * bound * (1.0 + 1e-9) } else { 1.0 };
    let terms = h.terms().iter().map(|t| t.scaled(1.0 / lambda_cap)).collect();
    Ok(ScaleInfo {
        lambda_cap,
        scaled: LocalHamiltonian::new(h.qubit_count(), terms)?,
    })
}

/// One Trotter slice `Π_j e^{2πi H′_j/m}`, one custom gate per term.
pub fn trotter_circuit(s: &ScaleInfo, m: u64) -> Result<Circuit> {
    if m == 0 {
        return Err(Error::invalid("Trotter step count must be at least 1"));
    }
    let gates = s
        .scaled
        .terms()
        .iter()
        .map(|term| {
            let u = exp_i_hermitian(term.matrix(), TAU / m as f64)?;
            Gate::custom(term.support().to_vec(), u)
        })
        .collect::<Result<Vec<_>>>()?;
    Circuit::new(s.scaled.qubit_count(), gates)
}

/// `m = ⌈(2πs)²·2^{t+1}/δ⌉` with `s = Σ_j‖H′_j‖`, so the accumulated Trotter
/// error over the `2^t − 1` evolutions of phase estimation stays below `δ/4`.
pub fn trotter_steps(s: &ScaleInfo, t: usize, delta: f64) -> u64 {
    let norm_sum = s.scaled.norm_bound();
    let m = (TAU * norm_sum).powi(2) * 2f64.powi(t as i32 + 1) / delta;
    (m.ceil() as u64).max(1)
}

/// `‖(slice_m)^m − e^{2πiH′}‖` in operator norm.
pub fn trotter_deviation(s: &ScaleInfo, m: u64) -> Result<f64> {
    let slice = trotter_circuit(s, m)?.unitary()?;
    let exact = exp_i_hermitian(&s.scaled.to_dense()?, TAU)?;
    Ok(operator_norm(&(&slice.pow(m) - &exact)))
}

/// Maps a phase in `[0, 1)` back to a scaled eigenvalue: `φ` below one half
/// is kept, otherwise `φ − 1`. The result is clamped to `[−1/4, 1/4]`.
pub fn unwrap_phase(phi: f64) -> f64 {
    let lambda = if phi < 0.5 { phi } else { phi - 1.0 };
    lambda.clamp(-0.25, 0.25)
}

/// Prepared eigenvalue sampler: Trotterized evolution, phase estimation at
/// precision `ε/Λ` and failure `δ/2`, then unwrap and rescale.
#[derive(Debug, Clone)]
pub struct LhesSampler {
    scale: ScaleInfo,
    steps: u64,
    distribution: PhaseDistribution,
}

impl LhesSampler {
    pub fn new(h: &LocalHamiltonian, req: &SamplingRequest) -> Result<Self> {
        if req.b.len() != h.qubit_count() {
            return Err(Error::DimensionMismatch {
                expected: h.qubit_count(),
                found: req.b.len(),
            });
        }
        let scale = scale_hamiltonian(h)?;
        let config = EstimatorConfig::for_precision(req.epsilon / scale.lambda_cap, req.delta / 2.0);
        let steps = trotter_steps(&scale, config.t, req.delta);
        let evolution = trotter_circuit(&scale, steps)?.unitary()?.pow(steps);
        let powers = DensePowers::new(evolution, config.t)?;
        let input = StateVector::basis(&BasisLabel::new(req.b.bits.clone(), 0), 1)?;
        let distribution = PhaseDistribution::prepare(&powers, &input, config)?;
        Ok(Self {
            scale,
            steps,
            distribution,
        })
    }

    pub fn scale(&self) -> &ScaleInfo {
        &self.scale
    }

    /// Trotter steps per evolution `e^{2πiH′}`.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn distribution(&self) -> &PhaseDistribution {
        &self.distribution
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EigenvalueSample {
        let phi = self.distribution.sample(rng).phi;
        EigenvalueSample {
            lambda_est: unwrap_phase(phi) * self.scale.lambda_cap,
        }
    }
}

/// One eigenvalue sample whose law `(ε, δ)`-approximates `{(λ_k, ⟨b|Π_k|b⟩)}`.
pub fn lhes_sample<R: Rng + ?Sized>(
    h: &LocalHamiltonian,
    req: &SamplingRequest,
    rng: &mut R,
) -> Result<EigenvalueSample> {
    Ok(LhesSampler::new(h, req)?.sample(rng))
}

/// `⟨b|H|b⟩ = Σ_j ⟨b|H_j|b⟩`, one diagonal entry per term.
pub fn exact_average_eigenvalue(h: &LocalHamiltonian, b: &BasisLabel) -> Result<f64> {
    if b.len() != h.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: h.qubit_count(),
            found: b.len(),
        });
    }
    Ok(h.terms().iter().map(|term| diagonal_entry(term, b)).sum())
}

fn diagonal_entry(term: &LocalTerm, b: &BasisLabel) -> f64 {
    let local = term
        .support()
        .iter()
        .fold(0usize, |acc, &q| (acc << 1) | usize::from(b.bits[q]));
    term.matrix()[(local, local)].re
}
