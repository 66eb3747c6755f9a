//! Phase estimation: quantum Fourier transform, controlled powers, the
//! textbook estimation circuit and its use as an eigenphase sampler for an
//! arbitrary basis-state input.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{measure_qubit, BasisLabel, Circuit, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{inner, vector_norm, ComplexMatrix, ONE};
use crate::tolerance;

/// Precision, failure probability and input basis state for a sampling call.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingRequest {
    pub epsilon: f64,
    pub delta: f64,
    pub b: BasisLabel,
}

impl SamplingRequest {
    pub fn new(epsilon: f64, delta: f64, b: BasisLabel) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::invalid(format!("delta must lie in (0, 1/2], got {delta}")));
        }
        Ok(Self { epsilon, delta, b })
    }
}

/// `⌈log₂ x⌉` for `x ≥ 1`, robust to round-off at exact powers of two.
pub fn ceil_log2(x: f64) -> usize {
    if x <= 1.0 {
        return 0;
    }
    let l = x.log2();
    let r = l.round();
    if (l - r).abs() < 1e-12 {
        r as usize
    } else {
        l.ceil() as usize
    }
}

/// Size of the phase register and the controlled powers it drives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimatorConfig {
    pub t: usize,
    /// `2^{t−1}, …, 2, 1`: the power controlled by each register qubit, most significant first.
    pub powers: Vec<u64>,
}

impl EstimatorConfig {
    /// `t = ⌈log₂(1/ε)⌉ + ⌈log₂(2 + 1/(2δ))⌉`.
    pub fn for_precision(epsilon: f64, delta: f64) -> Self {
        Self::with_t(ceil_log2(1.0 / epsilon) + Self::extra_bits(delta))
    }

    /// `t = n_bits + ⌈log₂(2 + 1/(2δ))⌉`.
    pub fn for_bits(n_bits: usize, delta: f64) -> Self {
        Self::with_t(n_bits + Self::extra_bits(delta))
    }

    fn extra_bits(delta: f64) -> usize {
        ceil_log2(2.0 + 1.0 / (2.0 * delta))
    }

    pub fn with_t(t: usize) -> Self {
        let t = t.max(1);
        Self {
            t,
            powers: (0..t).map(|j| 1u64 << (t - 1 - j)).collect(),
        }
    }

    /// Total base applications, `2^t − 1`.
    pub fn total_applications(&self) -> u64 {
        self.powers.iter().sum()
    }
}

/// A measured phase: `phi = raw / 2^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub phi: f64,
    pub raw: u64,
}

impl PhaseSample {
    pub fn from_raw(raw: u64, t: usize) -> Self {
        Self {
            phi: raw as f64 / (1u64 << t) as f64,
            raw,
        }
    }
}

/// Circular distance on `[0, 1)`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2")
}

fn phase_gate(angle: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[ONE, Complex64::from_polar(1.0, angle)])
}

/// Quantum Fourier transform on the listed qubits (first listed = most
/// significant), `|j⟩ ↦ 2^{−t/2} Σ_k e^{2πi jk/2^t} |k⟩`, or its inverse.
pub fn qft_apply(psi: &StateVector, register: &[usize], inverse: bool) -> Result<StateVector> {
    for (i, &q) in register.iter().enumerate() {
        if q >= psi.qubit_count() || register[..i].contains(&q) {
            return Err(Error::invalid(format!("bad QFT register {register:?}")));
        }
    }
    let mut out = psi.clone();
    qft_in_place(&mut out, register, inverse);
    Ok(out)
}

fn qft_in_place(psi: &mut StateVector, register: &[usize], inverse: bool) {
    let t = register.len();
    let h = hadamard();
    let sign = if inverse { -1.0 } else { 1.0 };
    // forward: H and controlled rotations per qubit, then bit reversal
    let mut ops: Vec<(ComplexMatrix, usize, Option<usize>)> = Vec::new();
    for i in 0..t {
        ops.push((h.clone(), register[i], None));
        for j in i + 1..t {
            let angle = sign * TAU / (1u64 << (j - i + 1)) as f64;
            ops.push((phase_gate(angle), register[i], Some(register[j])));
        }
    }
    let swap =
        ComplexMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]).expect("4x4");
    let swaps: Vec<(usize, usize)> = (0..t / 2).map(|i| (register[i], register[t - 1 - i])).collect();
    if inverse {
        for &(a, b) in &swaps {
            psi.apply_local(&swap, &[a, b], &[]);
        }
        for (m, target, control) in ops.iter().rev() {
            let controls: Vec<usize> = control.iter().copied().collect();
            psi.apply_local(m, &[*target], &controls);
        }
    } else {
        for (m, target, control) in &ops {
            let controls: Vec<usize> = control.iter().copied().collect();
            psi.apply_local(m, &[*target], &controls);
        }
        for &(a, b) in &swaps {
            psi.apply_local(&swap, &[a, b], &[]);
        }
    }
}

/// A unitary available only through controlled powers, acting on the
/// leading `qubit_count()` qubits of a register.
pub trait ControlledUnitary: Sync {
    fn qubit_count(&self) -> usize;

    /// Applies `U^power` conditioned on `control`; returns the number of
    /// base-unitary applications spent.
    fn apply_controlled_power(&self, psi: &mut StateVector, control: usize, power: u64) -> Result<u64>;
}

impl ControlledUnitary for Circuit {
    fn qubit_count(&self) -> usize {
        Circuit::qubit_count(self)
    }

    /// Gate-by-gate repetition: `power` sequential controlled runs of the circuit.
    fn apply_controlled_power(&self, psi: &mut StateVector, control: usize, power: u64) -> Result<u64> {
        if control < Circuit::qubit_count(self) {
            return Err(Error::invalid("control qubit lies inside the target register"));
        }
        for _ in 0..power {
            self.apply_in_place(psi, &[control])?;
        }
        Ok(power)
    }
}

/// Dense unitary with precomputed squarings `U, U², U⁴, …`.
#[derive(Debug, Clone)]
pub struct DensePowers {
    qubits: usize,
    squarings: Vec<ComplexMatrix>,
}

impl DensePowers {
    /// Precomputes `U^{2^j}` for `j < count`.
    pub fn new(unitary: ComplexMatrix, count: usize) -> Result<Self> {
        let dim = unitary.rows();
        if !unitary.is_square() || !dim.is_power_of_two() {
            return Err(Error::invalid(
                "dense unitary must be square with power-of-two dimension",
            ));
        }
        let qubits = dim.trailing_zeros() as usize;
        let mut squarings = Vec::with_capacity(count);
        let mut current = unitary;
        for j in 0..count {
            if j + 1 < count {
                let next = &current * &current;
                squarings.push(current);
                current = next;
            } else {
                squarings.push(current.clone());
            }
        }
        Ok(Self { qubits, squarings })
    }
}

impl ControlledUnitary for DensePowers {
    fn qubit_count(&self) -> usize {
        self.qubits
    }

    fn apply_controlled_power(&self, psi: &mut StateVector, control: usize, power: u64) -> Result<u64> {
        if !power.is_power_of_two() {
            return Err(Error::invalid(format!("power {power} is not a power of two")));
        }
        let j = power.trailing_zeros() as usize;
        let matrix = self
            .squarings
            .get(j)
            .ok_or_else(|| Error::invalid(format!("power 2^{j} was not precomputed")))?;
        if control < self.qubits {
            return Err(Error::invalid("control qubit lies inside the target register"));
        }
        let support: Vec<usize> = (0..self.qubits).collect();
        psi.apply_local(matrix, &support, &[control]);
        Ok(power)
    }
}

/// Applies `c` `power` times to its qubits, conditioned on `control`.
pub fn controlled_power_apply(c: &Circuit, control: usize, power: u64, psi: &StateVector) -> Result<StateVector> {
    if control >= psi.qubit_count() {
        return Err(Error::invalid(format!("control qubit {control} out of range")));
    }
    let mut out = psi.clone();
    c.apply_controlled_power(&mut out, control, power)?;
    Ok(out)
}

/// Runs the estimation circuit up to (not including) measurement.
///
/// The phase register of `t` qubits is appended after the system; its first
/// qubit is the most significant bit of the outcome. Returns the state and the
/// number of base-unitary applications.
pub fn estimation_state<U: ControlledUnitary + ?Sized>(
    unitary: &U,
    input: &StateVector,
    config: &EstimatorConfig,
) -> Result<(StateVector, u64)> {
    let n = unitary.qubit_count();
    if input.qubit_count() != n || input.clock_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: input.qubit_count(),
        });
    }
    let t = config.t;
    let mut state = input.with_appended_qubits(t);
    let h = hadamard();
    for j in 0..t {
        state.apply_local(&h, &[n + j], &[]);
    }
    let mut applications = 0;
    for (j, &power) in config.powers.iter().enumerate() {
        applications += unitary.apply_controlled_power(&mut state, n + j, power)?;
    }
    let register: Vec<usize> = (n..n + t).collect();
    qft_in_place(&mut state, &register, true);
    Ok((state, applications))
}

/// Measures the phase register of an estimation state, most significant qubit first.
fn measure_register<R: Rng + ?Sized>(
    state: StateVector,
    system_qubits: usize,
    t: usize,
    rng: &mut R,
) -> Result<(PhaseSample, StateVector)> {
    let mut state = state;
    let mut raw = 0u64;
    for j in 0..t {
        let (bit, post) = measure_qubit(&state, system_qubits + j, rng)?;
        raw = (raw << 1) | u64::from(bit);
        state = post;
    }
    Ok((PhaseSample::from_raw(raw, t), state))
}

/// Outcome law of the phase register for a prepared estimation state.
#[derive(Debug, Clone)]
pub struct PhaseDistribution {
    config: EstimatorConfig,
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
    applications: u64,
}

impl PhaseDistribution {
    pub fn prepare<U: ControlledUnitary + ?Sized>(
        unitary: &U,
        input: &StateVector,
        config: EstimatorConfig,
    ) -> Result<Self> {
        let (state, applications) = estimation_state(unitary, input, &config)?;
        let size = 1usize << config.t;
        let mut probabilities = vec![0.0; size];
        for (i, p) in state.qubit_probabilities().into_iter().enumerate() {
            probabilities[i % size] += p;
        }
        let mut cumulative = Vec::with_capacity(size);
        let mut acc = 0.0;
        for &p in &probabilities {
            acc += p;
            cumulative.push(acc);
        }
        Ok(Self {
            config,
            probabilities,
            cumulative,
            applications,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    /// Probability of each raw outcome `0 … 2^t − 1`.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Base-unitary applications used to prepare the state.
    pub fn applications(&self) -> u64 {
        self.applications
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhaseSample {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let u = rng.gen::<f64>() * total;
        let raw = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        PhaseSample::from_raw(raw as u64, self.config.t)
    }
}

/// Estimates the eigenphase of `eigenvector` to `n_bits` bits, failing with
/// probability at most `delta`.
pub fn phase_estimate<R: Rng + ?Sized>(
    c: &Circuit,
    eigenvector: &StateVector,
    n_bits: usize,
    delta: f64,
    rng: &mut R,
) -> Result<PhaseSample> {
    if eigenvector.qubit_count() != c.qubit_count() || eigenvector.clock_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: c.qubit_count(),
            found: eigenvector.qubit_count(),
        });
    }
    let image = c.apply(eigenvector)?;
    let lambda = eigenvector.inner(&image);
    let residual_vec: Vec<Complex64> = image
        .amplitudes()
        .iter()
        .zip(eigenvector.amplitudes())
        .map(|(u, v)| u - lambda * v)
        .collect();
    let residual = vector_norm(&residual_vec);
    if residual > tolerance::EIGENVECTOR {
        return Err(Error::NotEigenvector { residual });
    }
    let config = EstimatorConfig::for_bits(n_bits, delta);
    let (state, _) = estimation_state(c, eigenvector, &config)?;
    Ok(measure_register(state, c.qubit_count(), config.t, rng)?.0)
}

fn basis_input(c_qubits: usize, b: &BasisLabel) -> Result<StateVector> {
    if b.len() != c_qubits {
        return Err(Error::DimensionMismatch {
            expected: c_qubits,
            found: b.len(),
        });
    }
    StateVector::basis(&BasisLabel::new(b.bits.clone(), 0), 1)
}

/// One phase-estimation sample with `|b⟩` as input: the outcome law
/// `(ε, δ)`-approximates the eigenphase distribution `{(φ_j, |⟨b|η_j⟩|²)}`.
pub fn pes_sample<R: Rng + ?Sized>(c: &Circuit, req: &SamplingRequest, rng: &mut R) -> Result<PhaseSample> {
    Ok(pes_sample_collapsed(c, req, rng)?.0)
}

/// Like [`pes_sample`], also returning the post-measurement system state.
pub fn pes_sample_collapsed<R: Rng + ?Sized>(
    c: &Circuit,
    req: &SamplingRequest,
    rng: &mut R,
) -> Result<(PhaseSample, StateVector)> {
    let input = basis_input(c.qubit_count(), &req.b)?;
    let config = EstimatorConfig::for_precision(req.epsilon, req.delta);
    let (state, _) = estimation_state(c, &input, &config)?;
    let n = c.qubit_count();
    let (sample, post) = measure_register(state, n, config.t, rng)?;
    let size = 1usize << config.t;
    let system = post
        .amplitudes()
        .iter()
        .skip(sample.raw as usize)
        .step_by(size)
        .copied()
        .collect();
    Ok((sample, StateVector::normalized(n, 1, system)?))
}

/// Prepared phase sampler: simulates the estimation circuit once and then
/// draws outcomes from the exact register law.
#[derive(Debug, Clone)]
pub struct PesSampler {
    distribution: PhaseDistribution,
}

impl PesSampler {
    pub fn new(c: &Circuit, req: &SamplingRequest) -> Result<Self> {
        let input = basis_input(c.qubit_count(), &req.b)?;
        let config = EstimatorConfig::for_precision(req.epsilon, req.delta);
        Ok(Self {
            distribution: PhaseDistribution::prepare(c, &input, config)?,
        })
    }

    pub fn distribution(&self) -> &PhaseDistribution {
        &self.distribution
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhaseSample {
        self.distribution.sample(rng)
    }
}

/// Fidelity `|⟨u|v⟩|²` between two system states.
pub fn fidelity(u: &[Complex64], v: &[Complex64]) -> f64 {
    inner(u, v).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::linalg::ZERO;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn dft(t: usize, inverse: bool) -> ComplexMatrix {
        let d = 1usize << t;
        let sign = if inverse { -1.0 } else { 1.0 };
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..d {
            for k in 0..d {
                m[(k, j)] = Complex64::from_polar(1.0 / (d as f64).sqrt(), sign * TAU * (j * k) as f64 / d as f64);
            }
        }
        m
    }

    #[test]
    fn t_formula() {
        assert_eq!(EstimatorConfig::for_precision(1.0 / 32.0, 0.1).t, 5 + 3);
        assert_eq!(EstimatorConfig::for_precision(1.0 / 8.0, 0.01).t, 3 + 6);
        assert_eq!(EstimatorConfig::for_bits(4, 0.05).t, 4 + 4);
        let c = EstimatorConfig::for_precision(0.25, 0.5);
        assert_eq!(c.t, 2 + 2);
        assert_eq!(c.powers, vec![8, 4, 2, 1]);
        assert_eq!(c.total_applications(), 15);
    }

    #[test]
    fn request_validation() {
        let b = BasisLabel::zeros(1);
        assert!(SamplingRequest::new(0.0, 0.1, b.clone()).is_err());
        assert!(SamplingRequest::new(0.1, 0.0, b.clone()).is_err());
        assert!(SamplingRequest::new(0.1, 0.6, b.clone()).is_err());
        assert!(SamplingRequest::new(0.1, 0.5, b).is_ok());
    }

    #[test]
    fn single_qubit_qft_is_hadamard() {
        let psi = StateVector::from_amplitudes(1, 1, random::state(2, &mut rng(1))).unwrap();
        let q = qft_apply(&psi, &[0], false).unwrap();
        let want = hadamard().mul_vec(psi.amplitudes());
        for (a, b) in q.amplitudes().iter().zip(&want) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn qft_of_zero_is_uniform() {
        let q = qft_apply(&StateVector::zero(4, 1), &[0, 1, 2, 3], false).unwrap();
        for a in q.amplitudes() {
            assert!((a - Complex64::new(0.25, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn qft_matches_dft_matrix() {
        let psi = StateVector::from_amplitudes(3, 1, random::state(8, &mut rng(2))).unwrap();
        for inverse in [false, true] {
            let q = qft_apply(&psi, &[0, 1, 2], inverse).unwrap();
            let want = dft(3, inverse).mul_vec(psi.amplitudes());
            for (a, b) in q.amplitudes().iter().zip(&want) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qft_round_trip_on_subregister() {
        let psi = StateVector::from_amplitudes(4, 2, random::state(32, &mut rng(3))).unwrap();
        let fwd = qft_apply(&psi, &[3, 1, 0], false).unwrap();
        assert!((fwd.norm() - 1.0).abs() < 1e-10);
        let back = qft_apply(&fwd, &[3, 1, 0], true).unwrap();
        assert!(back.distance(&psi) < 1e-10);
    }

    #[test]
    fn controlled_power_cases() {
        let mut r = rng(4);
        let c = Circuit::new(1, vec![Gate::h(0)]).unwrap();
        let psi = StateVector::from_amplitudes(1, 1, random::state(2, &mut r))
            .unwrap()
            .with_appended_qubits(1);
        // control in |0⟩ leaves the state alone
        assert!(controlled_power_apply(&c, 1, 1, &psi).unwrap().distance(&psi) < 1e-15);

        let z = Circuit::new(1, vec![Gate::z(0)]).unwrap();
        let mut amps = random::state(2, &mut r);
        amps = amps.iter().flat_map(|&a| [ZERO, a]).collect();
        let controlled_one = StateVector::from_amplitudes(2, 1, amps).unwrap();
        let out = controlled_power_apply(&z, 1, 2, &controlled_one).unwrap();
        assert!(out.distance(&controlled_one) < 1e-15);
    }

    #[test]
    fn controlled_power_matches_dense_block() {
        let mut r = rng(5);
        let c = random::circuit(3, 12, &mut r);
        let u = c.unitary().unwrap();
        let psi = StateVector::from_amplitudes(4, 1, random::state(16, &mut r)).unwrap();
        let out = controlled_power_apply(&c, 3, 4, &psi).unwrap();
        // control is the least significant qubit: |0⟩⟨0| and |1⟩⟨1| act on the right factor
        let p0 = ComplexMatrix::diagonal(&[ONE, ZERO]);
        let p1 = ComplexMatrix::diagonal(&[ZERO, ONE]);
        let dense = &ComplexMatrix::identity(8).tensor(&p0) + &u.pow(4).tensor(&p1);
        let want = dense.mul_vec(psi.amplitudes());
        for (a, b) in out.amplitudes().iter().zip(&want) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn exact_phases_are_recovered() {
        let mut r = rng(6);
        let z = Circuit::new(1, vec![Gate::z(0)]).unwrap();
        let one = StateVector::basis(&"1".parse().unwrap(), 1).unwrap();
        for n_bits in 1..4 {
            let s = phase_estimate(&z, &one, n_bits, 0.1, &mut r).unwrap();
            assert_eq!(s.phi, 0.5);
        }
        let s_gate = Circuit::new(1, vec![Gate::s(0)]).unwrap();
        for n_bits in 2..5 {
            let s = phase_estimate(&s_gate, &one, n_bits, 0.1, &mut r).unwrap();
            assert_eq!(s.phi, 0.25);
        }
    }

    #[test]
    fn non_eigenvector_rejected() {
        let x = Circuit::new(1, vec![Gate::x(0)]).unwrap();
        let zero = StateVector::zero(1, 1);
        assert!(matches!(
            phase_estimate(&x, &zero, 2, 0.1, &mut rng(0)),
            Err(Error::NotEigenvector { .. })
        ));
    }

    /// Outcome law of phase estimation on an eigenphase `phi` with `t` qubits,
    /// from the closed-form geometric sum.
    fn geometric_law(phi: f64, t: usize) -> Vec<f64> {
        let d = (1u64 << t) as f64;
        (0..1u64 << t)
            .map(|k| {
                let x = phi - k as f64 / d;
                let den = (std::f64::consts::PI * x).sin();
                if den.abs() < 1e-15 {
                    1.0
                } else {
                    ((std::f64::consts::PI * d * x).sin() / (d * den)).powi(2)
                }
            })
            .collect()
    }

    #[test]
    fn estimation_law_matches_geometric_series() {
        let phi = 0.3;
        let gate = Gate::custom(
            vec![0],
            ComplexMatrix::diagonal(&[ONE, Complex64::from_polar(1.0, TAU * phi)]),
        )
        .unwrap();
        let c = Circuit::new(1, vec![gate]).unwrap();
        let one = StateVector::basis(&"1".parse().unwrap(), 1).unwrap();
        let config = EstimatorConfig::for_bits(4, 0.05);
        let dist = PhaseDistribution::prepare(&c, &one, config.clone()).unwrap();
        let law = geometric_law(phi, config.t);
        for (a, b) in dist.probabilities().iter().zip(&law) {
            assert!((a - b).abs() < 1e-12);
        }
        let failure: f64 = law
            .iter()
            .enumerate()
            .filter(|(k, _)| circular_distance(*k as f64 / 256.0, phi) > 1.0 / 16.0)
            .map(|(_, p)| p)
            .sum();
        assert!(failure <= 0.05);

        // empirical failure rate of the collapsing estimator
        let mut r = rng(7);
        let runs = 10_000;
        let failures = (0..runs)
            .filter(|_| {
                let s = phase_estimate(&c, &one, 4, 0.05, &mut r).unwrap();
                circular_distance(s.phi, phi) > 1.0 / 16.0
            })
            .count();
        let sigma = (0.05 * 0.95 / runs as f64).sqrt();
        assert!((failures as f64 / runs as f64) <= 0.05 + 3.0 * sigma);
    }

    #[test]
    fn work_count_is_two_to_the_t_minus_one() {
        let c = Circuit::new(1, vec![Gate::h(0)]).unwrap();
        let req = SamplingRequest::new(0.125, 0.25, BasisLabel::zeros(1)).unwrap();
        let sampler = PesSampler::new(&c, &req).unwrap();
        let t = sampler.distribution().config().t;
        assert_eq!(sampler.distribution().applications(), (1u64 << t) - 1);
    }

    #[test]
    fn eigenstate_input_is_sampled_exactly() {
        let z = Circuit::new(1, vec![Gate::z(0)]).unwrap();
        let req = SamplingRequest::new(0.1, 0.1, "1".parse().unwrap()).unwrap();
        let mut r = rng(8);
        for _ in 0..50 {
            assert_eq!(pes_sample(&z, &req, &mut r).unwrap().phi, 0.5);
        }
    }

    #[test]
    fn collapsing_and_prepared_samplers_agree() {
        // X has eigenphases 0 and 1/2 with weight 1/2 each from |0⟩
        let x = Circuit::new(1, vec![Gate::x(0)]).unwrap();
        let req = SamplingRequest::new(0.1, 0.1, "0".parse().unwrap()).unwrap();
        let prepared = PesSampler::new(&x, &req).unwrap();
        let probs = prepared.distribution().probabilities();
        let half = probs.len() / 2;
        assert!((probs[0] - 0.5).abs() < 1e-12 && (probs[half] - 0.5).abs() < 1e-12);

        let mut r = rng(9);
        let draws = 10_000;
        let halves = (0..draws)
            .filter(|_| pes_sample(&x, &req, &mut r).unwrap().phi == 0.5)
            .count();
        let sigma = (0.25 / draws as f64).sqrt();
        assert!((halves as f64 / draws as f64 - 0.5).abs() < 5.0 * sigma);
    }

    #[test]
    fn collapse_leaves_system_in_eigenvector() {
        // X from |0⟩: measuring 0 leaves |+⟩, measuring 1/2 leaves |−⟩
        let x = Circuit::new(1, vec![Gate::x(0)]).unwrap();
        let req = SamplingRequest::new(0.25, 0.1, "0".parse().unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
        let minus = [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)];
        let mut r = rng(10);
        for _ in 0..20 {
            let (s, post) = pes_sample_collapsed(&x, &req, &mut r).unwrap();
            let target = if s.phi == 0.0 { &plus } else { &minus };
            assert!(fidelity(target, post.amplitudes()) >= 1.0 - 0.1);
        }
    }

    #[test]
    fn dense_powers_match_circuit_powers() {
        let mut r = rng(11);
        let c = random::circuit(2, 10, &mut r);
        let input = StateVector::basis(&"01".parse().unwrap(), 1).unwrap();
        let config = EstimatorConfig::with_t(4);
        let via_circuit = PhaseDistribution::prepare(&c, &input, config.clone()).unwrap();
        let dense = DensePowers::new(c.unitary().unwrap(), config.t).unwrap();
        let via_dense = PhaseDistribution::prepare(&dense, &input, config).unwrap();
        for (a, b) in via_circuit.probabilities().iter().zip(via_dense.probabilities()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(via_dense.applications(), 15);
    }
}
