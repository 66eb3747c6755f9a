//! Gates, circuits, a statevector simulator over qubits ⊗ clock registers,
//! and the line-based circuit text format.

mod gate;
pub(crate) mod parse;
mod state;

pub use gate::{Gate, GateKind};
pub use parse::{parse_circuit, serialize_circuit};
pub use state::{measure_qubit, BasisLabel, StateVector};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};

/// Largest register for which `circuit_unitary` builds a dense matrix.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Ordered gate list on `qubit_count` qubits; gates apply first to last.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubit_count: usize, gates: Vec<Gate>) -> Result<Self> {
        for gate in &gates {
            if let Some(&q) = gate.support().iter().find(|&&q| q >= qubit_count) {
                return Err(Error::invalid(format!(
                    "gate {gate} touches qubit {q} on a {qubit_count}-qubit register"
                )));
            }
        }
        Ok(Self { qubit_count, gates })
    }

    pub fn empty(qubit_count: usize) -> Self {
        Self {
            qubit_count,
            gates: Vec::new(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&q) = gate.support().iter().find(|&&q| q >= self.qubit_count) {
            return Err(Error::invalid(format!("gate touches qubit {q} out of range")));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// `U† = U₁† ⋯ U_M†`: reversed order, each gate adjointed.
    pub fn inverse(&self) -> Self {
        Self {
            qubit_count: self.qubit_count,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Same gates on a wider register.
    pub fn widened(&self, qubit_count: usize) -> Result<Self> {
        Self::new(qubit_count, self.gates.clone())
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let mut out = psi.clone();
        self.apply_in_place(&mut out, &[])?;
        Ok(out)
    }

    /// Applies every gate conditioned on all `controls` qubits being 1. Controls
    /// and gate supports index the same register, which may be wider than the circuit.
    pub(crate) fn apply_in_place(&self, psi: &mut StateVector, controls: &[usize]) -> Result<()> {
        if psi.qubit_count() < self.qubit_count {
            return Err(Error::DimensionMismatch {
                expected: self.qubit_count,
                found: psi.qubit_count(),
            });
        }
        if controls.is_empty() && psi.qubit_count() != self.qubit_count {
            return Err(Error::DimensionMismatch {
                expected: self.qubit_count,
                found: psi.qubit_count(),
            });
        }
        for gate in &self.gates {
            psi.apply_local(gate.matrix(), gate.support(), controls);
        }
        Ok(())
    }

    /// Dense `U_M ⋯ U_1`, built from embedded gate matrices.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        if self.qubit_count > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge {
                what: "qubit count",
                size: self.qubit_count,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.qubit_count;
        let mut total = ComplexMatrix::identity(dim);
        for gate in &self.gates {
            let rows = embed_rows(gate.matrix(), gate.support(), self.qubit_count);
            let mut next = ComplexMatrix::zeros(dim, dim);
            for (r, entries) in rows.iter().enumerate() {
                for &(c, value) in entries {
                    for col in 0..dim {
                        next[(r, col)] += value * total[(c, col)];
                    }
                }
            }
            total = next;
        }
        Ok(total)
    }

    /// Splits `U|x⟩` by the value of qubit 0.
    pub fn output_split(&self, x: &BasisLabel) -> Result<OutputSplit> {
        if x.len() != self.qubit_count {
            return Err(Error::DimensionMismatch {
                expected: self.qubit_count,
                found: x.len(),
            });
        }
        if self.qubit_count == 0 {
            return Err(Error::invalid("output split needs at least one qubit"));
        }
        let out = self.apply(&StateVector::basis(&BasisLabel::new(x.bits.clone(), 0), 1)?)?;
        let half = out.dim() / 2;
        let amps = out.amplitudes();
        let (alpha0, psi0) = split_branch(&amps[..half], self.qubit_count - 1);
        let (alpha1, psi1) = split_branch(&amps[half..], self.qubit_count - 1);
        Ok(OutputSplit {
            alpha0,
            alpha1,
            psi0,
            psi1,
        })
    }
}

fn split_branch(amps: &[Complex64], qubits: usize) -> (Complex64, Option<StateVector>) {
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-14 {
        return (ZERO, None);
    }
    let lead = amps
        .iter()
        .find(|z| z.norm() > 1e-14 * norm)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead / lead.norm();
    let alpha = phase * norm;
    let branch = amps.iter().map(|z| z / alpha).collect();
    (alpha, Some(StateVector::from_raw(qubits, 1, branch)))
}

/// `U|x⟩ = α₀|0⟩|ψ₀⟩ + α₁|1⟩|ψ₁⟩`, with the phase of each `α` chosen so the
/// first nonzero amplitude of the matching `ψ` is real and positive.
#[derive(Debug, Clone)]
pub struct OutputSplit {
    pub alpha0: Complex64,
    pub alpha1: Complex64,
    pub psi0: Option<StateVector>,
    pub psi1: Option<StateVector>,
}

/// Sparse rows of `matrix` embedded on `support` inside an `n`-qubit register.
pub(crate) fn embed_rows(matrix: &ComplexMatrix, support: &[usize], n: usize) -> Vec<Vec<(usize, Complex64)>> {
    let k = support.len();
    let dim = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let local_of = |index: usize| {
        support
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | usize::from(index & bit(q) != 0))
    };
    let place = |index: usize, local: usize| {
        support.iter().enumerate().fold(index, |acc, (i, &q)| {
            if (local >> (k - 1 - i)) & 1 == 1 {
                acc | bit(q)
            } else {
                acc & !bit(q)
            }
        })
    };
    (0..dim)
        .map(|row| {
            let lr = local_of(row);
            (0..1usize << k)
                .filter_map(|lc| {
                    let value = matrix[(lr, lc)];
                    (value != ZERO).then(|| (place(row, lc), value))
                })
                .collect()
        })
        .collect()
}

/// Dense `2^n × 2^n` matrix of a local operator on `support`.
pub fn embed(matrix: &ComplexMatrix, support: &[usize], n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (r, entries) in embed_rows(matrix, support, n).into_iter().enumerate() {
        for (c, value) in entries {
            out[(r, c)] = value;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> Circuit {
        Circuit::new(2, vec![Gate::h(0), Gate::cnot(0, 1).unwrap()]).unwrap()
    }

    #[test]
    fn hadamard_on_zero() {
        let c = Circuit::new(1, vec![Gate::h(0)]).unwrap();
        let out = c.apply(&StateVector::zero(1, 1)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((out.amplitudes()[1].re - h).abs() < 1e-15);
    }

    #[test]
    fn bell_preparation() {
        let out = bell().apply(&StateVector::zero(2, 1)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, 0.0, 0.0, h];
        for (a, w) in out.amplitudes().iter().zip(want) {
            assert!((a - Complex64::new(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn bell_collapse() {
        let out = bell().apply(&StateVector::zero(2, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (b, post) = measure_qubit(&out, 0, &mut rng).unwrap();
            let label = BasisLabel::new(vec![b == 1, b == 1], 0);
            assert!((post.amplitude(&label).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_names() {
        let c = Circuit::new(1, vec![Gate::h(0)]).unwrap();
        assert_eq!(c.inverse().gates()[0].kind(), GateKind::H);
        let s = Circuit::new(1, vec![Gate::s(0)]).unwrap();
        assert_eq!(s.inverse().gates()[0].kind(), GateKind::Sdg);
        let t = Circuit::new(1, vec![Gate::named(GateKind::Tdg, vec![0]).unwrap()]).unwrap();
        assert_eq!(t.inverse().gates()[0].kind(), GateKind::T);
    }

    #[test]
    fn inverse_undoes_circuit() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = random::circuit(4, 30, &mut rng);
        let psi = StateVector::from_amplitudes(4, 1, random::state(16, &mut rng)).unwrap();
        let back = c.inverse().apply(&c.apply(&psi).unwrap()).unwrap();
        assert!(back.distance(&psi) < 1e-10);
    }

    #[test]
    fn simulator_agrees_with_dense_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let c = random::circuit(3, 25, &mut rng);
            let psi = StateVector::from_amplitudes(3, 1, random::state(8, &mut rng)).unwrap();
            let via_matrix = c.unitary().unwrap().mul_vec(psi.amplitudes());
            let via_sim = c.apply(&psi).unwrap();
            for (a, b) in via_sim.amplitudes().iter().zip(&via_matrix) {
                assert!((a - b).norm() < 1e-10);
            }
            assert!((via_sim.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_unitary_cases() {
        assert_eq!(Circuit::empty(2).unitary().unwrap(), ComplexMatrix::identity(4));
        let x = Circuit::new(1, vec![Gate::x(0)]).unwrap().unitary().unwrap();
        assert_eq!(x, ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let u = random::circuit(6, 40, &mut rng).unitary().unwrap();
        assert!(u.unitary_deviation() < 1e-9);
        assert!(matches!(Circuit::empty(13).unitary(), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn controlled_application_matches_block_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let u = random::unitary(4, &mut rng);
        let gate = Gate::custom(vec![1, 2], u.clone()).unwrap();
        let psi = StateVector::from_amplitudes(3, 1, random::state(8, &mut rng)).unwrap();
        let mut controlled = psi.clone();
        controlled.apply_local(gate.matrix(), gate.support(), &[0]);
        // |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ G with the control as most significant qubit
        let p0 = ComplexMatrix::diagonal(&[Complex64::new(1., 0.), ZERO]);
        let p1 = ComplexMatrix::diagonal(&[ZERO, Complex64::new(1., 0.)]);
        let block = &p0.tensor(&ComplexMatrix::identity(4)) + &p1.tensor(&u);
        let want = block.mul_vec(psi.amplitudes());
        for (a, b) in controlled.amplitudes().iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn output_split_cases() {
        let x = Circuit::new(2, vec![Gate::x(0)]).unwrap();
        let split = x.output_split(&BasisLabel::zeros(2)).unwrap();
        assert_eq!(split.alpha0, ZERO);
        assert!((split.alpha1 - Complex64::new(1., 0.)).norm() < 1e-15);
        assert!(split.psi0.is_none());

        let h = Circuit::new(1, vec![Gate::h(0)]).unwrap();
        let split = h.output_split(&BasisLabel::zeros(1)).unwrap();
        assert!((split.alpha0.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((split.alpha1.norm_sqr() - 0.5).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let c = random::circuit(3, 20, &mut rng);
        let x: BasisLabel = "101".parse().unwrap();
        let split = c.output_split(&x).unwrap();
        let out = c.apply(&StateVector::basis(&x, 1).unwrap()).unwrap();
        // qubit 0 is the most significant bit: rows 0..4 have it cleared
        let direct: f64 = out.amplitudes()[..4].iter().map(|z| z.norm_sqr()).sum();
        assert!((split.alpha0.norm_sqr() - direct).abs() < 1e-12);
        assert!((split.alpha0.norm_sqr() + split.alpha1.norm_sqr() - 1.0).abs() < 1e-10);
        for psi in [split.psi0.unwrap(), split.psi1.unwrap()] {
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let lead = psi.amplitudes().iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(lead.im.abs() < 1e-14 && lead.re > 0.0);
        }
    }

    #[test]
    fn out_of_range_gate_rejected() {
        assert!(Circuit::new(1, vec![Gate::x(1)]).is_err());
    }
}
