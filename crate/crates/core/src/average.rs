//! Average-eigenvalue estimation with the Hadamard test.
//!
//! `E[x] + i·E[y] = ⟨ψ|U|ψ⟩`, so sample means of `m = ⌈(8/ε²)·ln(4/δ)⌉`
//! draws per component estimate `⟨b|U|b⟩` to `ε` with probability `1 − δ`.

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{measure_qubit, BasisLabel, Circuit, StateVector, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::phase::SamplingRequest;

/// One draw of each Hadamard-test branch, both in `{−1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlusMinusSample {
    pub x: i8,
    pub y: i8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageEstimate {
    pub lambda_hat: Complex64,
    pub m_samples: u64,
    pub epsilon: f64,
    pub delta: f64,
}

/// Draws per component: `⌈(8/ε²)·ln(4/δ)⌉`.
pub fn sample_count(epsilon: f64, delta: f64) -> u64 {
    ((8.0 / (epsilon * epsilon)) * (4.0 / delta).ln()).ceil() as u64
}

fn validate(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Estimates `Re⟨ψ|U|ψ⟩`.
    Real,
    /// Estimates `Im⟨ψ|U|ψ⟩` (an `S†` on the ancilla before the last Hadamard).
    Imaginary,
}

fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2")
}

fn s_dagger() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)])
}

/// State just before the ancilla measurement. The ancilla is appended as the
/// last qubit.
fn test_state(c: &Circuit, psi: &StateVector, branch: Branch) -> Result<StateVector> {
    if psi.qubit_count() != c.qubit_count() || psi.clock_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: c.qubit_count(),
            found: psi.qubit_count(),
        });
    }
    let ancilla = c.qubit_count();
    let h = hadamard();
    let mut state = psi.with_appended_qubits(1);
    state.apply_local(&h, &[ancilla], &[]);
    c.apply_in_place(&mut state, &[ancilla])?;
    if branch == Branch::Imaginary {
        state.apply_local(&s_dagger(), &[ancilla], &[]);
    }
    state.apply_local(&h, &[ancilla], &[]);
    Ok(state)
}

fn prepared_state(c: &Circuit, prep: &Circuit) -> Result<StateVector> {
    if prep.qubit_count() != c.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: c.qubit_count(),
            found: prep.qubit_count(),
        });
    }
    prep.apply(&StateVector::zero(prep.qubit_count(), 1))
}

/// One simulated run of each branch, measuring the ancilla: `+1` on outcome 0.
pub fn hadamard_test_sample<R: Rng + ?Sized>(c: &Circuit, prep: &Circuit, rng: &mut R) -> Result<PlusMinusSample> {
    let psi = prepared_state(c, prep)?;
    let ancilla = c.qubit_count();
    let mut draw = |branch| -> Result<i8> {
        let (bit, _) = measure_qubit(&test_state(c, &psi, branch)?, ancilla, rng)?;
        Ok(if bit == 0 { 1 } else { -1 })
    };
    Ok(PlusMinusSample {
        x: draw(Branch::Real)?,
        y: draw(Branch::Imaginary)?,
    })
}

/// Hadamard test with both branch outcome probabilities computed once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardTest {
    p_zero_real: f64,
    p_zero_imaginary: f64,
}

impl HadamardTest {
    pub fn new(c: &Circuit, psi: &StateVector) -> Result<Self> {
        let ancilla = c.qubit_count();
        let p_zero = |branch| -> Result<f64> { Ok(1.0 - test_state(c, psi, branch)?.probability_one(ancilla)) };
        Ok(Self {
            p_zero_real: p_zero(Branch::Real)?,
            p_zero_imaginary: p_zero(Branch::Imaginary)?,
        })
    }

    /// Test on `prep|0…0⟩`.
    pub fn with_prep(c: &Circuit, prep: &Circuit) -> Result<Self> {
        Self::new(c, &prepared_state(c, prep)?)
    }

    /// Test on the basis state `|b⟩`.
    pub fn with_basis(c: &Circuit, b: &BasisLabel) -> Result<Self> {
        if b.len() != c.qubit_count() {
            return Err(Error::DimensionMismatch {
                expected: c.qubit_count(),
                found: b.len(),
            });
        }
        Self::new(c, &StateVector::basis(&BasisLabel::new(b.bits.clone(), 0), 1)?)
    }

    /// `E[x] + i·E[y]`.
    pub fn expectation(&self) -> Complex64 {
        Complex64::new(2.0 * self.p_zero_real - 1.0, 2.0 * self.p_zero_imaginary - 1.0)
    }

    pub fn draw<R: Rng + ?Sized>(&self, branch: Branch, rng: &mut R) -> i8 {
        let p = match branch {
            Branch::Real => self.p_zero_real,
            Branch::Imaginary => self.p_zero_imaginary,
        };
        if rng.gen::<f64>() < p {
            1
        } else {
            -1
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PlusMinusSample {
        PlusMinusSample {
            x: self.draw(Branch::Real, rng),
            y: self.draw(Branch::Imaginary, rng),
        }
    }
}

/// Estimates `⟨b|U|b⟩`; draw `i` of the run uses the real branch for even
/// `i` and the imaginary branch for odd `i`.
pub fn luae_estimate<R: Rng + ?Sized>(c: &Circuit, req: &SamplingRequest, rng: &mut R) -> Result<AverageEstimate> {
    let (epsilon, delta) = (req.epsilon, req.delta);
    let test = HadamardTest::with_basis(c, &req.b)?;
    let m = sample_count(epsilon, delta);
    let (mut sx, mut sy) = (0i64, 0i64);
    for _ in 0..m {
        sx += i64::from(test.draw(Branch::Real, rng));
        sy += i64::from(test.draw(Branch::Imaginary, rng));
    }
    Ok(AverageEstimate {
        lambda_hat: Complex64::new(sx as f64 / m as f64, sy as f64 / m as f64),
        m_samples: m,
        epsilon,
        delta,
    })
}

/// Estimates `tr(U)/2^n`: every pair of draws uses a fresh uniform `b`.
pub fn luae_unguided<R: Rng + ?Sized>(c: &Circuit, epsilon: f64, delta: f64, rng: &mut R) -> Result<AverageEstimate> {
    validate(epsilon, delta)?;
    let n = c.qubit_count();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge {
            what: "qubit count",
            size: n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let tests = (0..1usize << n)
        .map(|i| HadamardTest::with_basis(c, &BasisLabel::from_index(i, n)))
        .collect::<Result<Vec<_>>>()?;
    let m = sample_count(epsilon, delta);
    let (mut sx, mut sy) = (0i64, 0i64);
    for _ in 0..m {
        let test = &tests[rng.gen_range(0..tests.len())];
        sx += i64::from(test.draw(Branch::Real, rng));
        sy += i64::from(test.draw(Branch::Imaginary, rng));
    }
    Ok(AverageEstimate {
        lambda_hat: Complex64::new(sx as f64 / m as f64, sy as f64 / m as f64),
        m_samples: m,
        epsilon,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::linalg::unitary_eig;
    use crate::oracle::{approx_check, ApproxCheckInstance, Metric, SpectralDistribution};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn req(epsilon: f64, delta: f64, b: &str) -> SamplingRequest {
        SamplingRequest::new(epsilon, delta, b.parse().unwrap()).unwrap()
    }

    fn one(gate: Gate) -> Circuit {
        Circuit::new(1, vec![gate]).unwrap()
    }

    #[test]
    fn sample_count_formula() {
        assert_eq!(sample_count(0.5, 0.5), (32.0 * 8f64.ln()).ceil() as u64);
        assert_eq!(sample_count(0.05, 0.01), (3200.0 * 400f64.ln()).ceil() as u64);
    }

    #[test]
    fn identity_gives_plus_one() {
        let c = Circuit::empty(1);
        let prep = Circuit::empty(1);
        let mut r = rng(1);
        for _ in 0..50 {
            assert_eq!(hadamard_test_sample(&c, &prep, &mut r).unwrap().x, 1);
        }
        let test = HadamardTest::with_prep(&c, &prep).unwrap();
        assert!((test.expectation() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn minus_identity_gives_minus_one() {
        let minus = Gate::custom(vec![0], ComplexMatrix::identity(2).scale_real(-1.0)).unwrap();
        let c = one(minus);
        let mut r = rng(2);
        for _ in 0..50 {
            assert_eq!(hadamard_test_sample(&c, &Circuit::empty(1), &mut r).unwrap().x, -1);
        }
    }

    #[test]
    fn z_on_plus_has_zero_mean() {
        let c = one(Gate::z(0));
        let prep = one(Gate::h(0));
        let test = HadamardTest::with_prep(&c, &prep).unwrap();
        let mut r = rng(3);
        let draws = 100_000;
        let (mut sx, mut sy) = (0i64, 0i64);
        for _ in 0..draws {
            let s = test.sample(&mut r);
            sx += i64::from(s.x);
            sy += i64::from(s.y);
        }
        let bound = 5.0 / (draws as f64).sqrt();
        assert!((sx as f64 / draws as f64).abs() < bound);
        assert!((sy as f64 / draws as f64).abs() < bound);
    }

    #[test]
    fn simulated_and_prepared_tests_agree() {
        let mut r = rng(4);
        let c = random::circuit(2, 8, &mut r);
        let prep = random::circuit(2, 4, &mut r);
        let test = HadamardTest::with_prep(&c, &prep).unwrap();
        let psi = prep.apply(&StateVector::zero(2, 1)).unwrap();
        let target = psi.inner(&c.apply(&psi).unwrap());
        assert!((test.expectation() - target).norm() < 1e-12);

        let draws = 20_000;
        let (mut sx, mut sy) = (0i64, 0i64);
        for _ in 0..draws {
            let s = hadamard_test_sample(&c, &prep, &mut r).unwrap();
            sx += i64::from(s.x);
            sy += i64::from(s.y);
        }
        let bound = 5.0 / (draws as f64).sqrt();
        assert!((sx as f64 / draws as f64 - target.re).abs() < bound);
        assert!((sy as f64 / draws as f64 - target.im).abs() < bound);
    }

    #[test]
    fn dimension_mismatch() {
        let c = Circuit::empty(2);
        let prep = Circuit::empty(1);
        assert!(matches!(
            hadamard_test_sample(&c, &prep, &mut rng(0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn luae_trivial_cases() {
        let mut r = rng(5);
        let e = luae_estimate(&Circuit::empty(2), &req(0.1, 0.05, "01"), &mut r).unwrap();
        assert!((e.lambda_hat - Complex64::new(1.0, 0.0)).norm() <= 0.1);
        assert!(e.lambda_hat.norm() <= 2f64.sqrt());
        let e = luae_estimate(&one(Gate::z(0)), &req(0.1, 0.05, "1"), &mut r).unwrap();
        assert!((e.lambda_hat + Complex64::new(1.0, 0.0)).norm() <= 0.1);
        assert_eq!(e.m_samples, sample_count(0.1, 0.05));
    }

    #[test]
    fn luae_random_circuit() {
        let mut r = rng(6);
        let c = random::circuit(3, 15, &mut r);
        let b: BasisLabel = "010".parse().unwrap();
        let target = c.unitary().unwrap()[(b.qubit_index(), b.qubit_index())];
        let misses = (0..100)
            .filter(|_| {
                let e = luae_estimate(&c, &req(0.05, 0.01, "010"), &mut r).unwrap();
                (e.lambda_hat - target).norm() > 0.05
            })
            .count();
        assert!(misses <= 1);
    }

    #[test]
    fn unguided_trivial_cases() {
        let mut r = rng(7);
        let e = luae_unguided(&Circuit::empty(3), 0.1, 0.05, &mut r).unwrap();
        assert!((e.lambda_hat - Complex64::new(1.0, 0.0)).norm() <= 0.1);
        let e = luae_unguided(&one(Gate::z(0)), 0.1, 0.05, &mut r).unwrap();
        assert!(e.lambda_hat.norm() <= 0.1);
    }

    #[test]
    fn average_is_projector_weighted_mean() {
        let mut r = rng(8);
        for n in 1..=4 {
            let u = random::circuit(n, 10, &mut r).unitary().unwrap();
            let eig = unitary_eig(&u).unwrap();
            for row in 0..1usize << n {
                let mean: Complex64 = eig
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .map(|(k, l)| l * eig.eigenvectors[(row, k)].norm_sqr())
                    .sum();
                assert!((mean - u[(row, row)]).norm() < 1e-9);
            }
        }
        // degenerate spectrum: Z⊗Z
        let zz = Circuit::new(2, vec![Gate::z(0), Gate::z(1)])
            .unwrap()
            .unitary()
            .unwrap();
        let eig = unitary_eig(&zz).unwrap();
        let mean: Complex64 = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, l)| l * eig.eigenvectors[(1, k)].norm_sqr())
            .sum();
        assert!((mean + Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    /// A phase law that satisfies the sampling contract can still move the
    /// mean of `e^{2πiφ}` by about `2δ`, so averaging black-box samples does
    /// not estimate the average eigenvalue to precision below `δ`.
    #[test]
    fn black_box_phase_means_can_miss_the_average() {
        let delta = 0.1;
        let epsilon = 0.01;
        let p = SpectralDistribution::new(vec![(0.0, 1.0)], Metric::Circular).unwrap();
        let q = SpectralDistribution::new(vec![(0.0, 1.0 - delta), (0.5, delta)], Metric::Circular).unwrap();
        let check = approx_check(&ApproxCheckInstance {
            p: p.clone(),
            q: q.clone(),
            epsilon,
            delta,
        })
        .unwrap();
        assert!(check.feasible);
        let mean = |d: &SpectralDistribution| -> Complex64 {
            d.points()
                .iter()
                .map(|&(phi, w)| Complex64::from_polar(w, std::f64::consts::TAU * phi))
                .sum()
        };
        assert!((mean(&p) - mean(&q)).norm() > epsilon);
        assert!(((mean(&p) - mean(&q)).norm() - 2.0 * delta).abs() < 1e-12);
    }
}
