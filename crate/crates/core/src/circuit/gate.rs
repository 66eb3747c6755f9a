use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Cnot,
    Cz,
    Swap,
    /// Custom 2×2 unitary.
    U1,
    /// Custom 4×4 unitary on an ordered qubit pair.
    U2,
    /// Custom unitary on three or four qubits; internal only, no text token.
    Custom,
}

impl GateKind {
    pub fn token(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::U1 => "u1",
            GateKind::U2 => "u2",
            GateKind::Custom => "custom",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Some(match token {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "cnot" => GateKind::Cnot,
            "cz" => GateKind::Cz,
            "swap" => GateKind::Swap,
            "u1" => GateKind::U1,
            "u2" => GateKind::U2,
            _ => return None,
        })
    }

    /// Number of qubits, or `None` for the variable-width custom kind.
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Swap | GateKind::U2 => Some(2),
            GateKind::Custom => None,
            _ => Some(1),
        }
    }

    pub fn is_custom(self) -> bool {
        matches!(self, GateKind::U1 | GateKind::U2 | GateKind::Custom)
    }

    fn adjoint(self) -> Self {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            other => other,
        }
    }

    fn matrix(self) -> Option<ComplexMatrix> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let h = FRAC_1_SQRT_2;
        let m = match self {
            GateKind::H => ComplexMatrix::from_real(2, 2, &[h, h, h, -h]),
            GateKind::X => ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]),
            GateKind::Y => ComplexMatrix::from_vec(2, 2, vec![ZERO, c(0., -1.), c(0., 1.), ZERO]),
            GateKind::Z => ComplexMatrix::from_real(2, 2, &[1., 0., 0., -1.]),
            GateKind::S => Ok(ComplexMatrix::diagonal(&[ONE, c(0., 1.)])),
            GateKind::Sdg => Ok(ComplexMatrix::diagonal(&[ONE, c(0., -1.)])),
            GateKind::T => Ok(ComplexMatrix::diagonal(&[ONE, Complex64::from_polar(1., FRAC_PI_4)])),
            GateKind::Tdg => Ok(ComplexMatrix::diagonal(&[ONE, Complex64::from_polar(1., -FRAC_PI_4)])),
            GateKind::Cnot => {
                ComplexMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.])
            }
            GateKind::Cz => Ok(ComplexMatrix::diagonal(&[ONE, ONE, ONE, -ONE])),
            GateKind::Swap => {
                ComplexMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.])
            }
            GateKind::U1 | GateKind::U2 | GateKind::Custom => return None,
        };
        Some(m.expect("fixed gate matrices are well formed"))
    }
}

/// An elementary unitary acting on an ordered list of qubits. The first
/// support qubit is the most significant bit of the gate's local index.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    support: Vec<usize>,
    matrix: ComplexMatrix,
}

impl Gate {
    pub fn named(kind: GateKind, support: Vec<usize>) -> Result<Self> {
        let matrix = kind
            .matrix()
            .ok_or_else(|| Error::invalid(format!("{} requires an explicit matrix", kind.token())))?;
        let arity = kind.arity().expect("named gates have fixed arity");
        check_support(&support, arity)?;
        Ok(Self { kind, support, matrix })
    }

    /// Custom unitary gate; the kind is `U1`, `U2` or `Custom` by support size.
    pub fn custom(support: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        Self::custom_with_tolerance(support, matrix, tolerance::UNITARY)
    }

    pub(crate) fn custom_with_tolerance(support: Vec<usize>, matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let k = support.len();
        if k == 0 || k > 4 {
            return Err(Error::invalid(format!("custom gate on {k} qubits")));
        }
        check_support(&support, k)?;
        let dim = 1 << k;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.rows(),
            });
        }
        let deviation = matrix.unitary_deviation();
        if deviation > tol {
            return Err(Error::NotUnitary { deviation });
        }
        let kind = match k {
            1 => GateKind::U1,
            2 => GateKind::U2,
            _ => GateKind::Custom,
        };
        Ok(Self { kind, support, matrix })
    }

    pub fn h(q: usize) -> Self {
        Self::named(GateKind::H, vec![q]).expect("valid")
    }

    pub fn x(q: usize) -> Self {
        Self::named(GateKind::X, vec![q]).expect("valid")
    }

    pub fn z(q: usize) -> Self {
        Self::named(GateKind::Z, vec![q]).expect("valid")
    }

    pub fn s(q: usize) -> Self {
        Self::named(GateKind::S, vec![q]).expect("valid")
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Self::named(GateKind::Cnot, vec![control, target])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.token()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            kind: self.kind.adjoint(),
            support: self.support.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Same gate with every qubit index passed through `map`.
    pub fn relabeled(&self, map: impl Fn(usize) -> usize) -> Self {
        Self {
            kind: self.kind,
            support: self.support.iter().map(|&q| map(q)).collect(),
            matrix: self.matrix.clone(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qubits: Vec<String> = self.support.iter().map(ToString::to_string).collect();
        write!(f, "{}@({})", self.name(), qubits.join(","))
    }
}

fn check_support(support: &[usize], arity: usize) -> Result<()> {
    if support.len() != arity {
        return Err(Error::invalid(format!(
            "expected {arity} qubits, got {}",
            support.len()
        )));
    }
    for (i, q) in support.iter().enumerate() {
        if support[..i].contains(q) {
            return Err(Error::invalid(format!("qubit {q} repeated in gate support")));
        }
    }
    Ok(())
}
