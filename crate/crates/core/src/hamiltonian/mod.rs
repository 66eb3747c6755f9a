//! Local Hamiltonians `H = Σ_j H_j` and their text format.
//!
//! ```text
//! qubits 2
//! term 1 0 <8 reals>        # 2×2 Hermitian matrix on qubit 0, (re, im) pairs
//! term 2 0 1 <32 reals>
//! ```

mod evolution;

pub use evolution::{
    exact_average_eigenvalue, lhes_sample, scale_hamiltonian, trotter_circuit, trotter_deviation, trotter_steps,
    unwrap_phase, EigenvalueSample, LhesSampler, ScaleInfo,
};

use crate::circuit::parse::{format_matrix, parse_header, parse_matrix, parse_qubit, tokenized_lines};
use crate::circuit::{embed, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::tolerance;

/// Widest supported term.
pub const MAX_TERM_QUBITS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    support: Vec<usize>,
    matrix: ComplexMatrix,
}

impl LocalTerm {
    pub fn new(support: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(support, matrix, tolerance::HERMITIAN)
    }

    pub(crate) fn with_tolerance(support: Vec<usize>, matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let k = support.len();
        if k == 0 {
            return Err(Error::invalid("term with empty support"));
        }
        if k > MAX_TERM_QUBITS {
            return Err(Error::TermTooLarge {
                support: k,
                limit: MAX_TERM_QUBITS,
            });
        }
        for (i, q) in support.iter().enumerate() {
            if support[..i].contains(q) {
                return Err(Error::invalid(format!("qubit {q} repeated in term support")));
            }
        }
        if matrix.rows() != 1 << k || matrix.cols() != 1 << k {
            return Err(Error::DimensionMismatch {
                expected: 1 << k,
                found: matrix.rows(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { support, matrix })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn norm(&self) -> f64 {
        operator_norm(&self.matrix)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            support: self.support.clone(),
            matrix: self.matrix.scale_real(factor),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonian {
    qubit_count: usize,
    terms: Vec<LocalTerm>,
}

impl LocalHamiltonian {
    /// Checks qubit ranges and the sanity bound of `10·n⁴` terms.
    pub fn new(qubit_count: usize, terms: Vec<LocalTerm>) -> Result<Self> {
        let limit = 10 * qubit_count.pow(4);
        if terms.len() > limit {
            return Err(Error::TooLarge {
                what: "term count",
                size: terms.len(),
                limit,
            });
        }
        for term in &terms {
            if let Some(&q) = term.support.iter().find(|&&q| q >= qubit_count) {
                return Err(Error::invalid(format!(
                    "term qubit {q} out of range for {qubit_count} qubits"
                )));
            }
        }
        Ok(Self { qubit_count, terms })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_j ‖H_j‖`.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(LocalTerm::norm).sum()
    }

    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        if self.qubit_count > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge {
                what: "qubit count",
                size: self.qubit_count,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.qubit_count;
        let mut total = ComplexMatrix::zeros(dim, dim);
        for term in &self.terms {
            total = &total + &embed(&term.matrix, &term.support, self.qubit_count);
        }
        Ok(total)
    }
}

pub fn parse_hamiltonian(text: &str) -> Result<LocalHamiltonian> {
    let mut lines = tokenized_lines(text);
    let n = parse_header(&mut lines)?;
    let mut terms = Vec::new();
    for (line, tokens) in lines {
        if tokens[0] != "term" {
            return Err(Error::parse(line, format!("expected `term`, found {:?}", tokens[0])));
        }
        let k = tokens
            .get(1)
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| Error::parse(line, "missing or bad term size"))?;
        if k == 0 || k > MAX_TERM_QUBITS {
            return Err(Error::parse(
                line,
                format!("term size {k} outside 1..={MAX_TERM_QUBITS}"),
            ));
        }
        let args = &tokens[2..];
        if args.len() < k {
            return Err(Error::parse(line, format!("term needs {k} qubit indices")));
        }
        let support = args[..k]
            .iter()
            .map(|t| parse_qubit(t, n, line))
            .collect::<Result<Vec<_>>>()?;
        let matrix = parse_matrix(&args[k..], 1 << k, line)?;
        let term = LocalTerm::with_tolerance(support, matrix, tolerance::PARSE_HERMITIAN)
            .map_err(|e| Error::parse(line, e.to_string()))?;
        terms.push(term);
    }
    LocalHamiltonian::new(n, terms)
}

pub fn serialize_hamiltonian(h: &LocalHamiltonian) -> String {
    let mut out = format!("qubits {}\n", h.qubit_count);
    for term in &h.terms {
        out.push_str(&format!("term {}", term.support.len()));
        for q in &term.support {
            out.push_str(&format!(" {q}"));
        }
        out.push_str(&format_matrix(&term.matrix));
        out.push('\n');
    }
    out
}
