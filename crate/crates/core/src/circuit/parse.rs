//! Circuit text format.
//!
//! ```text
//! # comment
//! qubits 2
//! h 0
//! cnot 0 1
//! u1 0 <8 reals>        # 2×2 matrix, row-major, (re, im) pairs
//! u2 0 1 <32 reals>     # 4×4 matrix on the ordered pair
//! ```

use num_complex::Complex64;

use super::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::tolerance;

/// Splits text into `(line number, tokens)` for non-blank, non-comment lines.
pub(crate) fn tokenized_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

/// Reads the `qubits <n>` header, which must be the first content line.
pub(crate) fn parse_header<'a>(lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>) -> Result<usize> {
    let (line, tokens) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `qubits <n>` header"))?;
    match tokens.as_slice() {
        ["qubits", n] => n
            .parse::<usize>()
            .map_err(|_| Error::parse(line, format!("bad qubit count {n:?}"))),
        _ => Err(Error::parse(line, "expected `qubits <n>` header")),
    }
}

pub(crate) fn parse_qubit(token: &str, n: usize, line: usize) -> Result<usize> {
    let q = token
        .parse::<usize>()
        .map_err(|_| Error::parse(line, format!("bad qubit index {token:?}")))?;
    if q >= n {
        return Err(Error::parse(line, format!("qubit {q} out of range (register has {n})")));
    }
    Ok(q)
}

/// Reads `dim²` complex entries given as consecutive (re, im) pairs.
pub(crate) fn parse_matrix(tokens: &[&str], dim: usize, line: usize) -> Result<ComplexMatrix> {
    if tokens.len() != 2 * dim * dim {
        return Err(Error::parse(
            line,
            format!("expected {} reals, found {}", 2 * dim * dim, tokens.len()),
        ));
    }
    let reals = tokens
        .iter()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::parse(line, format!("bad number {t:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let entries = reals.chunks(2).map(|pair| Complex64::new(pair[0], pair[1])).collect();
    ComplexMatrix::from_vec(dim, dim, entries)
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = tokenized_lines(text);
    let n = parse_header(&mut lines)?;
    let mut gates = Vec::new();
    for (line, tokens) in lines {
        let name = tokens[0];
        let kind = GateKind::from_token(name).ok_or_else(|| Error::parse(line, format!("unknown gate {name:?}")))?;
        let arity = kind.arity().expect("text tokens have fixed arity");
        let args = &tokens[1..];
        let gate = if kind.is_custom() {
            if args.len() < arity {
                return Err(Error::parse(line, format!("{name} needs {arity} qubit indices")));
            }
            let support = args[..arity]
                .iter()
                .map(|t| parse_qubit(t, n, line))
                .collect::<Result<Vec<_>>>()?;
            let matrix = parse_matrix(&args[arity..], 1 << arity, line)?;
            Gate::custom_with_tolerance(support, matrix, tolerance::PARSE_UNITARY)
        } else {
            if args.len() != arity {
                return Err(Error::parse(
                    line,
                    format!("{name} takes {arity} qubit indices, found {}", args.len()),
                ));
            }
            let support = args
                .iter()
                .map(|t| parse_qubit(t, n, line))
                .collect::<Result<Vec<_>>>()?;
            Gate::named(kind, support)
        }
        .map_err(|e| Error::parse(line, e.to_string()))?;
        gates.push(gate);
    }
    Circuit::new(n, gates)
}

/// Text form of a circuit. Fails for custom gates wider than two qubits,
/// which have no token in the format.
pub fn serialize_circuit(circuit: &Circuit) -> Result<String> {
    let mut out = format!("qubits {}\n", circuit.qubit_count());
    for gate in circuit.gates() {
        if gate.kind() == GateKind::Custom {
            return Err(Error::invalid(format!(
                "{}-qubit custom gate has no text form",
                gate.support().len()
            )));
        }
        out.push_str(gate.name());
        for q in gate.support() {
            out.push_str(&format!(" {q}"));
        }
        if gate.kind().is_custom() {
            out.push_str(&format_matrix(gate.matrix()));
        }
        out.push('\n');
    }
    Ok(out)
}

pub(crate) fn format_matrix(m: &ComplexMatrix) -> String {
    m.as_slice().iter().map(|z| format!(" {:?} {:?}", z.re, z.im)).collect()
}
