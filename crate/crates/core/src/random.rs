//! Random instances: matrices, circuits and local Hamiltonians for tests,
//! benchmarks and demonstrations.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::hamiltonian::{LocalHamiltonian, LocalTerm};
use crate::linalg::{inner, vector_norm, ComplexMatrix};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn complex_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("sizes agree")
}

pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let a = complex_matrix(dim, dim, rng);
    (&a + &a.adjoint()).scale_real(0.5)
}

/// Haar-distributed unitary via Gram–Schmidt on a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let a = complex_matrix(dim, dim, rng);
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut v = a.column(c);
        for _ in 0..2 {
            for b in &basis {
                let proj = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
        }
        let norm = vector_norm(&v);
        v.iter_mut().for_each(|x| *x /= norm);
        out.set_column(c, &v);
        basis.push(v);
    }
    out
}

/// Unit vector with Gaussian components.
pub fn state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = vector_norm(&v);
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Random circuit mixing named gates with random `u1`/`u2` unitaries.
pub fn circuit<R: Rng + ?Sized>(qubits: usize, gates: usize, rng: &mut R) -> Circuit {
    const SINGLE: [GateKind; 8] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
    ];
    const DOUBLE: [GateKind; 3] = [GateKind::Cnot, GateKind::Cz, GateKind::Swap];
    let mut list = Vec::with_capacity(gates);
    for _ in 0..gates {
        let two = qubits >= 2 && rng.gen_bool(0.4);
        let gate = if two {
            let a = rng.gen_range(0..qubits);
            let mut b = rng.gen_range(0..qubits - 1);
            if b >= a {
                b += 1;
            }
            match rng.gen_range(0..4) {
                3 => Gate::custom(vec![a, b], unitary(4, rng)),
                i => Gate::named(DOUBLE[i], vec![a, b]),
            }
        } else {
            let q = rng.gen_range(0..qubits);
            match rng.gen_range(0..10) {
                8 | 9 => Gate::custom(vec![q], unitary(2, rng)),
                i => Gate::named(SINGLE[i], vec![q]),
            }
        };
        list.push(gate.expect("generated gates are valid"));
    }
    Circuit::new(qubits, list).expect("generated circuit is valid")
}

/// Random Hamiltonian with `terms` terms, each on `locality` distinct qubits.
pub fn local_hamiltonian<R: Rng + ?Sized>(
    qubits: usize,
    terms: usize,
    locality: usize,
    rng: &mut R,
) -> LocalHamiltonian {
    let list = (0..terms)
        .map(|_| {
            let mut support: Vec<usize> = Vec::with_capacity(locality);
            while support.len() < locality {
                let q = rng.gen_range(0..qubits);
                if !support.contains(&q) {
                    support.push(q);
                }
            }
            LocalTerm::new(support, hermitian(1 << locality, rng)).expect("valid term")
        })
        .collect();
    LocalHamiltonian::new(qubits, list).expect("valid Hamiltonian")
}
