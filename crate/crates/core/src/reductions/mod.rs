//! Hardness constructions: marked circuits `V`, the cyclic clock propagator
//! `F`, the clock Hamiltonian `H = F + F†` (compact and one-hot clock), the
//! history-state analysis and decision procedures driven by sampling oracles.
//!
//! Register layout for the copy construction: the `n` qubits of `U` come
//! first, the copy qubit `r` is qubit `n`, and in the compact form the clock
//! is the least significant factor.

mod decide;

pub use decide::{
    decide_via_lhes, decide_via_luae, decide_via_pes, lhes_problem, lhes_vote, pes_vote, ExactLhesOracle,
    ExactLuaeOracle, ExactPhaseOracle, LhesDecider, LhesDecision, LhesOracle, LhesProblem, LuaeOracle, PesDecider,
    PhaseOracle, QuantumLhesOracle, QuantumLuaeOracle, QuantumPhaseOracle, SampleSource, LHES_RETRY_FACTOR,
    LHES_SURVIVORS, LHES_VOTE_THRESHOLD, PES_DRAWS,
};

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::circuit::{embed, BasisLabel, Circuit, Gate, StateVector};
use crate::error::{Error, Result};
use crate::hamiltonian::{LocalHamiltonian, LocalTerm};
use crate::linalg::{ComplexMatrix, ONE, ZERO};

/// Largest compact clock space `2^{sys}·N` that is assembled densely.
pub const MAX_COMPACT_DIM: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkKind {
    /// `U`, CNOT from qubit 0 onto a fresh copy qubit, `U†`.
    LhesCopy,
    /// `U`, `Z` on qubit 0, `U†`.
    PeReflect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkedCircuit {
    pub base: Circuit,
    pub full: Circuit,
    pub kind: MarkKind,
    pub r_qubit: Option<usize>,
}

impl MarkedCircuit {
    /// `M`, the gate count of `U`.
    pub fn m(&self) -> usize {
        self.base.len()
    }

    /// `N = 2M + 1`, the gate count of `V`.
    pub fn n(&self) -> usize {
        self.full.len()
    }
}

pub fn mark_circuit(u: &Circuit, kind: MarkKind) -> Result<MarkedCircuit> {
    if u.is_empty() {
        return Err(Error::EmptyCircuit);
    }
    let n = u.qubit_count();
    let (width, middle, r_qubit) = match kind {
        MarkKind::LhesCopy => (n + 1, Gate::cnot(0, n)?, Some(n)),
        MarkKind::PeReflect => (n, Gate::z(0), None),
    };
    let mut gates: Vec<Gate> = u.gates().to_vec();
    gates.push(middle);
    gates.extend(u.gates().iter().rev().map(Gate::adjoint));
    Ok(MarkedCircuit {
        base: u.clone(),
        full: Circuit::new(width, gates)?,
        kind,
        r_qubit,
    })
}

/// `F = Σ_{j=1}^{N−1} V_j ⊗ |j⟩⟨j−1| + V_N ⊗ |0⟩⟨N−1|`.
#[derive(Debug, Clone)]
pub struct ClockPropagator {
    pub system_qubits: usize,
    pub clock_dim: usize,
    pub assembled: ComplexMatrix,
    /// `(V_j, from clock, to clock)` for `j = 1…N`.
    pub term_view: Vec<(Gate, usize, usize)>,
}

impl ClockPropagator {
    /// `F^power` applied to a state over the compact space.
    pub fn apply_power(&self, psi: &StateVector, power: usize) -> StateVector {
        let mut amps = psi.amplitudes().to_vec();
        for _ in 0..power {
            amps = self.assembled.mul_vec(&amps);
        }
        StateVector::from_raw(self.system_qubits, self.clock_dim, amps)
    }
}

pub fn build_clock_propagator(mc: &MarkedCircuit) -> Result<ClockPropagator> {
    let sys = mc.full.qubit_count();
    let clock_dim = mc.full.len();
    let dim = (1usize << sys) * clock_dim;
    if sys >= usize::BITS as usize - 1 || dim > MAX_COMPACT_DIM {
        return Err(Error::TooLarge {
            what: "compact clock dimension",
            size: dim,
            limit: MAX_COMPACT_DIM,
        });
    }
    let term_view: Vec<(Gate, usize, usize)> = mc
        .full
        .gates()
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), i, (i + 1) % clock_dim))
        .collect();
    let mut assembled = ComplexMatrix::zeros(dim, dim);
    for (gate, from, to) in &term_view {
        let v = embed(gate.matrix(), gate.support(), sys);
        for r in 0..1usize << sys {
            for c in 0..1usize << sys {
                let value = v[(r, c)];
                if value != ZERO {
                    assembled[(r * clock_dim + to, c * clock_dim + from)] = value;
                }
            }
        }
    }
    Ok(ClockPropagator {
        system_qubits: sys,
        clock_dim,
        assembled,
        term_view,
    })
}

/// `H = F + F†` over the compact clock space.
pub fn build_clock_hamiltonian(fp: &ClockPropagator) -> ComplexMatrix {
    &fp.assembled + &fp.assembled.adjoint()
}

/// `|0⟩_r|x, 𝟎⟩` at clock 0: the copy qubit follows the input bits.
pub fn history_start(mc: &MarkedCircuit, x: &BasisLabel) -> Result<BasisLabel> {
    if x.len() != mc.base.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: mc.base.qubit_count(),
            found: x.len(),
        });
    }
    let mut bits = x.bits.clone();
    if mc.r_qubit.is_some() {
        bits.push(false);
    }
    Ok(BasisLabel::new(bits, 0))
}

/// Integer grid `{k/N}` and half-integer grid `{(k + 1/2)/N}` of eigenphases of `F`.
pub fn phase_grids(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    (
        (0..n).map(|k| k as f64 / nf).collect(),
        (0..n).map(|k| (k as f64 + 0.5) / nf).collect(),
    )
}

/// Eigenvalues `2cos(2πφ)` of `H` on both grids.
pub fn energy_grids(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = phase_grids(n);
    let energy = |phi: f64| 2.0 * (TAU * phi).cos();
    (a.into_iter().map(energy).collect(), b.into_iter().map(energy).collect())
}

/// `(value, weight)` pairs.
pub type WeightedPoints = Vec<(f64, f64)>;

/// Predicted `⟨start|Π_E|start⟩` on each grid energy of `H`: every grid
/// phase on the integer grid carries `(1 + |α₀|²)/(2N)`, every phase on the
/// half grid `|α₁|²/(2N)`. Returned per phase, not merged over equal energies.
pub fn predicted_grid_weights(n: usize, alpha0_sq: f64) -> (WeightedPoints, WeightedPoints) {
    let (a, b) = energy_grids(n);
    let nf = n as f64;
    let plus = (1.0 + alpha0_sq) / (2.0 * nf);
    let minus = (1.0 - alpha0_sq) / (2.0 * nf);
    (
        a.into_iter().map(|e| (e, plus)).collect(),
        b.into_iter().map(|e| (e, minus)).collect(),
    )
}

#[derive(Debug, Clone)]
pub struct HistoryAnalysis {
    /// `|φ_{x,j}⟩ = F^j|start⟩` for `j = 0 … 2N−1`.
    pub phi_states: Vec<StateVector>,
    /// `overlap[(j, j′)] = ⟨φ_{x,j}|φ_{x,j′}⟩`.
    pub overlap: ComplexMatrix,
    pub alpha0_sq: f64,
    pub alpha1_sq: f64,
    /// Normalized `φ_{x,j} + φ_{x,N+j}`, `j < N`.
    pub plus_basis: Vec<StateVector>,
    /// Normalized `φ_{x,j} − φ_{x,N+j}`; empty when `|α₀| = 1`.
    pub minus_basis: Vec<StateVector>,
    pub integer_grid: Vec<f64>,
    pub half_grid: Vec<f64>,
    pub weights_plus: f64,
    pub weights_minus: f64,
    /// `‖P₋|φ_{x,0}⟩‖²` measured against `minus_basis`.
    pub minus_mass: f64,
}

pub fn analyze_history(mc: &MarkedCircuit, x: &BasisLabel) -> Result<HistoryAnalysis> {
    if mc.kind != MarkKind::LhesCopy {
        return Err(Error::invalid("history analysis needs the copy construction"));
    }
    let fp = build_clock_propagator(mc)?;
    let n = fp.clock_dim;
    let start = StateVector::basis(&history_start(mc, x)?, n)?;
    let mut phi_states = Vec::with_capacity(2 * n);
    let mut current = start;
    for _ in 0..2 * n {
        let next = fp.apply_power(&current, 1);
        phi_states.push(current);
        current = next;
    }
    let mut overlap = ComplexMatrix::zeros(2 * n, 2 * n);
    for (i, a) in phi_states.iter().enumerate() {
        for (j, b) in phi_states.iter().enumerate() {
            overlap[(i, j)] = a.inner(b);
        }
    }
    let split = mc.base.output_split(x)?;
    let alpha0_sq = split.alpha0.norm_sqr();
    let alpha1_sq = split.alpha1.norm_sqr();

    let combine = |sign: f64| -> Option<Vec<StateVector>> {
        (0..n)
            .map(|j| {
                let amps: Vec<Complex64> = phi_states[j]
                    .amplitudes()
                    .iter()
                    .zip(phi_states[n + j].amplitudes())
                    .map(|(a, b)| a + sign * b)
                    .collect();
                StateVector::normalized(fp.system_qubits, n, amps).ok()
            })
            .collect()
    };
    let plus_basis = combine(1.0).ok_or_else(|| Error::invalid("degenerate history plus basis"))?;
    let minus_basis = if alpha1_sq > 1e-12 {
        combine(-1.0).unwrap_or_default()
    } else {
        Vec::new()
    };
    let minus_mass = minus_basis.iter().map(|g| g.inner(&phi_states[0]).norm_sqr()).sum();
    let (integer_grid, half_grid) = phase_grids(n);
    Ok(HistoryAnalysis {
        phi_states,
        overlap,
        alpha0_sq,
        alpha1_sq,
        plus_basis,
        minus_basis,
        integer_grid,
        half_grid,
        weights_plus: (1.0 + alpha0_sq) / (2.0 * n as f64),
        weights_minus: alpha1_sq / (2.0 * n as f64),
        minus_mass,
    })
}

/// `H` with the clock stored one-hot in `N` extra qubits: clock value `i` is
/// `|e_i⟩`, a single 1 on clock qubit `system_qubits + i`.
#[derive(Debug, Clone)]
pub struct UnaryClockHamiltonian {
    pub system_qubits: usize,
    pub clock_qubits: usize,
    pub terms: LocalHamiltonian,
}

impl UnaryClockHamiltonian {
    /// Qubit holding clock position `i`.
    pub fn clock_qubit(&self, i: usize) -> usize {
        self.system_qubits + i
    }

    /// Label of a system basis state with the clock at `|e_i⟩`.
    pub fn legal_label(&self, system: &BasisLabel, i: usize) -> BasisLabel {
        let clock = (0..self.clock_qubits).map(|k| k == i).collect();
        system.concat(&BasisLabel::new(clock, 0))
    }

    /// Index in the unary register of compact basis state `(s, i)`.
    pub fn legal_index(&self, s: usize, i: usize) -> usize {
        (s << self.clock_qubits) | (1usize << (self.clock_qubits - 1 - i))
    }

    /// `P_legal H P_legal` in compact coordinates.
    pub fn legal_restriction(&self) -> Result<ComplexMatrix> {
        let dense = self.terms.to_dense()?;
        let n = self.clock_qubits;
        let dim = (1usize << self.system_qubits) * n;
        let index = |k: usize| self.legal_index(k / n, k % n);
        let mut out = ComplexMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                out[(r, c)] = dense[(index(r), index(c))];
            }
        }
        Ok(out)
    }
}

/// `|01⟩⟨10|` on an ordered clock pair: moves the 1 from the first qubit to the second.
fn hop() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(1, 2)] = ONE;
    m
}

pub fn build_unary_clock(mc: &MarkedCircuit) -> Result<UnaryClockHamiltonian> {
    let sys = mc.full.qubit_count();
    let n = mc.full.len();
    let a = hop();
    let terms = mc
        .full
        .gates()
        .iter()
        .enumerate()
        .map(|(i, gate)| {
            let (from, to) = (sys + i, sys + (i + 1) % n);
            let mut support = gate.support().to_vec();
            support.extend([from, to]);
            let forward = gate.matrix().tensor(&a);
            let matrix = &forward + &forward.adjoint();
            LocalTerm::new(support, matrix)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnaryClockHamiltonian {
        system_qubits: sys,
        clock_qubits: n,
        terms: LocalHamiltonian::new(sys + n, terms)?,
    })
}
