use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{inner, vector_norm, ComplexMatrix, ONE, ZERO};
use crate::tolerance;

/// Computational basis label: one bit per qubit (qubit 0 first) plus a clock index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub bits: Vec<bool>,
    pub clock_index: usize,
}

impl BasisLabel {
    pub fn new(bits: Vec<bool>, clock_index: usize) -> Self {
        Self { bits, clock_index }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![false; n], 0)
    }

    /// Label for the integer `value` on `n` qubits, qubit 0 as most significant bit.
    pub fn from_index(value: usize, n: usize) -> Self {
        let bits = (0..n).map(|q| (value >> (n - 1 - q)) & 1 == 1).collect();
        Self::new(bits, 0)
    }

    pub fn with_clock(mut self, clock_index: usize) -> Self {
        self.clock_index = clock_index;
        self
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Qubit part as an integer, qubit 0 most significant.
    pub fn qubit_index(&self) -> usize {
        self.bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    /// Position of this basis vector in an amplitude array with the given clock dimension.
    pub fn amplitude_index(&self, clock_dim: usize) -> usize {
        self.qubit_index() * clock_dim + self.clock_index
    }

    /// Concatenates the bit strings; the clock index of `self` is kept.
    pub fn concat(&self, other: &BasisLabel) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self::new(bits, self.clock_index)
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    /// Parses `"0110"` or `"0110@3"` (bits, then optional clock index).
    fn from_str(s: &str) -> Result<Self> {
        let (bits_part, clock) = match s.split_once('@') {
            Some((b, c)) => (
                b,
                c.parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad clock index in {s:?}")))?,
            ),
            None => (s, 0),
        };
        let bits = bits_part
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::invalid(format!("bad bit {ch:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(bits, clock))
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.clock_index != 0 {
            write!(f, "@{}", self.clock_index)?;
        }
        Ok(())
    }
}

/// Pure state of `n` qubits tensored with an optional clock register of
/// dimension `N` (the least significant factor). `N = 1` means no clock.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    clock_dim: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩ ⊗ |0⟩_clock`.
    pub fn zero(qubits: usize, clock_dim: usize) -> Self {
        Self::basis(&BasisLabel::zeros(qubits), clock_dim).expect("zero label is in range")
    }

    pub fn basis(label: &BasisLabel, clock_dim: usize) -> Result<Self> {
        if clock_dim == 0 || label.clock_index >= clock_dim {
            return Err(Error::invalid(format!(
                "clock index {} out of range for clock dimension {clock_dim}",
                label.clock_index
            )));
        }
        let qubits = label.len();
        let mut amplitudes = vec![ZERO; (1usize << qubits) * clock_dim];
        amplitudes[label.amplitude_index(clock_dim)] = ONE;
        Ok(Self {
            qubits,
            clock_dim,
            amplitudes,
        })
    }

    /// Validates the length and unit norm of the amplitude array.
    pub fn from_amplitudes(qubits: usize, clock_dim: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = (1usize << qubits) * clock_dim;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        let norm = vector_norm(&amplitudes);
        if (norm - 1.0).abs() > tolerance::NORM {
            return Err(Error::invalid(format!("state norm {norm} is not 1")));
        }
        Ok(Self {
            qubits,
            clock_dim,
            amplitudes,
        })
    }

    /// Normalizes a nonzero vector into a state.
    pub fn normalized(qubits: usize, clock_dim: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = vector_norm(&amplitudes);
        if norm == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::from_amplitudes(qubits, clock_dim, amplitudes)
    }

    pub(crate) fn from_raw(qubits: usize, clock_dim: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), (1usize << qubits) * clock_dim);
        Self {
            qubits,
            clock_dim,
            amplitudes,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn clock_dim(&self) -> usize {
        self.clock_dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.amplitudes[label.amplitude_index(self.clock_dim)]
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        vector_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Largest amplitude difference to another state of the same shape.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|self⟩ ⊗ |0…0⟩` with `extra` new qubits appended after the existing ones.
    pub fn with_appended_qubits(&self, extra: usize) -> Self {
        let block = 1usize << extra;
        let n = self.clock_dim;
        let mut amplitudes = vec![ZERO; self.amplitudes.len() * block];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let (q, clock) = (i / n, i % n);
            amplitudes[(q * block) * n + clock] = a;
        }
        Self::from_raw(self.qubits + extra, n, amplitudes)
    }

    /// Stride of qubit `q` in the amplitude array.
    pub(crate) fn stride(&self, q: usize) -> usize {
        self.clock_dim << (self.qubits - 1 - q)
    }

    /// Applies a `2^k × 2^k` matrix on `support` (first entry most significant),
    /// restricted to the subspace where every `controls` qubit is 1.
    pub(crate) fn apply_local(&mut self, matrix: &ComplexMatrix, support: &[usize], controls: &[usize]) {
        let k = support.len();
        let dim = 1usize << k;
        debug_assert_eq!(matrix.rows(), dim);
        let offsets: Vec<usize> = (0..dim)
            .map(|local| {
                support
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (local >> (k - 1 - i)) & 1 == 1)
                    .map(|(_, &q)| self.stride(q))
                    .sum()
            })
            .collect();
        let support_mask: usize = support.iter().map(|&q| 1usize << (self.qubits - 1 - q)).sum();
        let control_mask: usize = controls.iter().map(|&q| 1usize << (self.qubits - 1 - q)).sum();
        let mut gathered = vec![ZERO; dim];
        let n = self.clock_dim;
        for qidx in 0..(1usize << self.qubits) {
            if qidx & support_mask != 0 || qidx & control_mask != control_mask {
                continue;
            }
            for clock in 0..n {
                let base = qidx * n + clock;
                for (g, &off) in gathered.iter_mut().zip(&offsets) {
                    *g = self.amplitudes[base + off];
                }
                for (r, &off) in offsets.iter().enumerate() {
                    self.amplitudes[base + off] = matrix.row(r).iter().zip(&gathered).map(|(m, g)| m * g).sum();
                }
            }
        }
    }

    /// Born probability that qubit `q` reads 1.
    pub fn probability_one(&self, q: usize) -> f64 {
        let mask = 1usize << (self.qubits - 1 - q);
        let n = self.clock_dim;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i / n) & mask != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    /// Probabilities of every qubit-register value, summed over the clock.
    pub fn qubit_probabilities(&self) -> Vec<f64> {
        let n = self.clock_dim;
        self.amplitudes
            .chunks(n)
            .map(|chunk| chunk.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }
}

/// Projective measurement of qubit `q` in the computational basis.
///
/// Returns the outcome and the collapsed, renormalized state.
pub fn measure_qubit<R: Rng + ?Sized>(psi: &StateVector, q: usize, rng: &mut R) -> Result<(u8, StateVector)> {
    if q >= psi.qubit_count() {
        return Err(Error::invalid(format!(
            "qubit {q} out of range for {} qubits",
            psi.qubit_count()
        )));
    }
    let p_one = psi.probability_one(q).clamp(0.0, 1.0);
    let outcome = u8::from(rng.gen::<f64>() < p_one);
    let p = if outcome == 1 { p_one } else { 1.0 - p_one };
    let scale = 1.0 / p.sqrt();
    let mask = 1usize << (psi.qubit_count() - 1 - q);
    let n = psi.clock_dim();
    let amplitudes = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let bit = u8::from((i / n) & mask != 0);
            if bit == outcome {
                z * scale
            } else {
                ZERO
            }
        })
        .collect();
    Ok((outcome, StateVector::from_raw(psi.qubit_count(), n, amplitudes)))
}
