//! Classical decision procedures that query sampling oracles.

use num_complex::Complex64;
use rand::RngCore;

use super::{
    build_clock_hamiltonian, build_clock_propagator, build_unary_clock, energy_grids, history_start, mark_circuit,
    MarkKind, MarkedCircuit,
};
use crate::average::luae_estimate;
use crate::circuit::{BasisLabel, Circuit};
use crate::error::{Error, Result};
use crate::hamiltonian::{LhesSampler, LocalHamiltonian};
use crate::linalg::{ComplexMatrix, SpectrumKind};
use crate::oracle::{exact_distribution, exact_sampler, SpectralDistribution};
use crate::phase::{PesSampler, SamplingRequest};

/// Surviving draws collected by the amplified LHES decider.
pub const LHES_SURVIVORS: usize = 200;
/// The LHES decider accepts when more than this fraction of survivors vote "in L".
pub const LHES_VOTE_THRESHOLD: f64 = 0.25;
/// Consecutive discarded draws allowed per required survivor.
pub const LHES_RETRY_FACTOR: usize = 10;
/// Draws in the PES majority vote.
pub const PES_DRAWS: usize = 51;

/// A prepared source of i.i.d. samples.
pub trait SampleSource: Send + Sync {
    fn draw(&self, rng: &mut dyn RngCore) -> f64;
}

struct Distribution(SpectralDistribution);

impl SampleSource for Distribution {
    fn draw(&self, rng: &mut dyn RngCore) -> f64 {
        exact_sampler(&self.0, rng)
    }
}

struct Lhes(LhesSampler);

impl SampleSource for Lhes {
    fn draw(&self, rng: &mut dyn RngCore) -> f64 {
        self.0.sample(rng).lambda_est
    }
}

struct Pes(PesSampler);

impl SampleSource for Pes {
    fn draw(&self, rng: &mut dyn RngCore) -> f64 {
        self.0.sample(rng).phi
    }
}

/// The clock Hamiltonian of a copy-marked circuit in both encodings, with
/// the history start state labelled in each.
#[derive(Debug, Clone)]
pub struct LhesProblem {
    pub compact: ComplexMatrix,
    pub compact_label: BasisLabel,
    pub local: LocalHamiltonian,
    pub local_label: BasisLabel,
}

pub fn lhes_problem(u: &Circuit, x: &BasisLabel) -> Result<(MarkedCircuit, LhesProblem)> {
    let mc = mark_circuit(u, MarkKind::LhesCopy)?;
    let start = history_start(&mc, x)?;
    let compact = build_clock_hamiltonian(&build_clock_propagator(&mc)?);
    let unary = build_unary_clock(&mc)?;
    let local_label = unary.legal_label(&start, 0);
    Ok((
        mc,
        LhesProblem {
            compact,
            compact_label: start,
            local: unary.terms,
            local_label,
        },
    ))
}

/// Eigenvalue sampler for a Hamiltonian and basis state.
pub trait LhesOracle {
    fn prepare(&self, problem: &LhesProblem, epsilon: f64, delta: f64) -> Result<Box<dyn SampleSource>>;
}

/// Exact eigenvalue law of the compact Hamiltonian.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactLhesOracle;

impl LhesOracle for ExactLhesOracle {
    fn prepare(&self, problem: &LhesProblem, _: f64, _: f64) -> Result<Box<dyn SampleSource>> {
        let d = exact_distribution(&problem.compact, &problem.compact_label, SpectrumKind::Hermitian)?;
        Ok(Box::new(Distribution(d)))
    }
}

/// Simulated phase-estimation sampler on the one-hot clock Hamiltonian.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuantumLhesOracle;

impl LhesOracle for QuantumLhesOracle {
    fn prepare(&self, problem: &LhesProblem, epsilon: f64, delta: f64) -> Result<Box<dyn SampleSource>> {
        let req = SamplingRequest::new(epsilon, delta, problem.local_label.clone())?;
        Ok(Box::new(Lhes(LhesSampler::new(&problem.local, &req)?)))
    }
}

/// Eigenphase sampler for a circuit and basis state.
pub trait PhaseOracle {
    fn prepare(&self, c: &Circuit, req: &SamplingRequest) -> Result<Box<dyn SampleSource>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactPhaseOracle;

impl PhaseOracle for ExactPhaseOracle {
    fn prepare(&self, c: &Circuit, req: &SamplingRequest) -> Result<Box<dyn SampleSource>> {
        let d = exact_distribution(&c.unitary()?, &req.b, SpectrumKind::Unitary)?;
        Ok(Box::new(Distribution(d)))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct QuantumPhaseOracle;

impl PhaseOracle for QuantumPhaseOracle {
    fn prepare(&self, c: &Circuit, req: &SamplingRequest) -> Result<Box<dyn SampleSource>> {
        Ok(Box::new(Pes(PesSampler::new(c, req)?)))
    }
}

/// Average-eigenvalue estimator `λ̂ ≈ ⟨b|U|b⟩`.
pub trait LuaeOracle {
    fn estimate(&self, c: &Circuit, req: &SamplingRequest, rng: &mut dyn RngCore) -> Result<Complex64>;
}

/// Returns the dense matrix entry `⟨b|U|b⟩`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactLuaeOracle;

impl LuaeOracle for ExactLuaeOracle {
    fn estimate(&self, c: &Circuit, req: &SamplingRequest, _: &mut dyn RngCore) -> Result<Complex64> {
        if req.b.len() != c.qubit_count() {
            return Err(Error::DimensionMismatch {
                expected: c.qubit_count(),
                found: req.b.len(),
            });
        }
        let i = req.b.qubit_index();
        Ok(c.unitary()?[(i, i)])
    }
}

/// Hadamard-test estimator.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuantumLuaeOracle;

impl LuaeOracle for QuantumLuaeOracle {
    fn estimate(&self, c: &Circuit, req: &SamplingRequest, rng: &mut dyn RngCore) -> Result<Complex64> {
        Ok(luae_estimate(c, req, rng)?.lambda_hat)
    }
}

/// Classifies one LHES draw for a clock of length `n`: `None` when `|a| > 1`
/// (the draw is discarded), `Some(true)` when the half-integer energy grid is
/// strictly nearer than the integer grid.
pub fn lhes_vote(a: f64, n: usize) -> Option<bool> {
    // energies sitting exactly on ±1 must survive round-off in 2cos(·)
    if !a.is_finite() || a.abs() > 1.0 + 1e-9 {
        return None;
    }
    let (integer, half) = energy_grids(n);
    let nearest = |grid: &[f64]| grid.iter().map(|e| (a - e).abs()).fold(f64::INFINITY, f64::min);
    Some(nearest(&half) < nearest(&integer))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhesDecision {
    pub accept: bool,
    pub votes_in: usize,
    pub survivors: usize,
    pub draws: usize,
}

impl LhesDecision {
    pub fn vote_fraction(&self) -> f64 {
        self.votes_in as f64 / self.survivors as f64
    }
}

/// The LHES decision procedure with its oracle prepared once.
pub struct LhesDecider {
    clock: usize,
    source: Box<dyn SampleSource>,
}

impl LhesDecider {
    /// Requests samples at `ε = 1/(4N)`, `δ = 1/100` for the history start state.
    pub fn new(u: &Circuit, x: &BasisLabel, oracle: &dyn LhesOracle) -> Result<Self> {
        let (mc, problem) = lhes_problem(u, x)?;
        let n = mc.n();
        let source = oracle.prepare(&problem, 1.0 / (4.0 * n as f64), 0.01)?;
        Ok(Self { clock: n, source })
    }

    /// One draw: `None` if discarded, otherwise the "in L" vote.
    pub fn draw_vote(&self, rng: &mut dyn RngCore) -> Option<bool> {
        lhes_vote(self.source.draw(rng), self.clock)
    }

    /// Collects `LHES_SURVIVORS` surviving draws and accepts when the
    /// half-grid vote fraction exceeds `LHES_VOTE_THRESHOLD`.
    pub fn decide(&self, rng: &mut dyn RngCore) -> Result<LhesDecision> {
        let (mut survivors, mut votes_in, mut draws, mut streak) = (0, 0, 0, 0);
        while survivors < LHES_SURVIVORS {
            draws += 1;
            match self.draw_vote(rng) {
                None => {
                    streak += 1;
                    if streak >= LHES_RETRY_FACTOR * LHES_SURVIVORS {
                        return Err(Error::OracleFailure(format!(
                            "{streak} consecutive draws outside [-1, 1]"
                        )));
                    }
                }
                Some(vote) => {
                    streak = 0;
                    survivors += 1;
                    votes_in += usize::from(vote);
                }
            }
        }
        Ok(LhesDecision {
            accept: votes_in as f64 / survivors as f64 > LHES_VOTE_THRESHOLD,
            votes_in,
            survivors,
            draws,
        })
    }
}

pub fn decide_via_lhes(u: &Circuit, x: &BasisLabel, oracle: &dyn LhesOracle, rng: &mut dyn RngCore) -> Result<bool> {
    Ok(LhesDecider::new(u, x, oracle)?.decide(rng)?.accept)
}

/// Accept vote for one PES draw: `θ ∈ [1/4, 3/4]`.
pub fn pes_vote(theta: f64) -> bool {
    (0.25..=0.75).contains(&theta)
}

/// The PES decision procedure on `V = U·Z·U†` with its oracle prepared once.
pub struct PesDecider {
    source: Box<dyn SampleSource>,
}

impl PesDecider {
    /// Requests samples at `ε = 1/8`, `δ = 1/100` for `b = x`.
    pub fn new(u: &Circuit, x: &BasisLabel, oracle: &dyn PhaseOracle) -> Result<Self> {
        let mc = mark_circuit(u, MarkKind::PeReflect)?;
        let req = SamplingRequest::new(0.125, 0.01, BasisLabel::new(x.bits.clone(), 0))?;
        Ok(Self {
            source: oracle.prepare(&mc.full, &req)?,
        })
    }

    pub fn draw_vote(&self, rng: &mut dyn RngCore) -> Result<bool> {
        let theta = self.source.draw(rng);
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::OracleFailure(format!("phase {theta} outside [0, 1)")));
        }
        Ok(pes_vote(theta))
    }

    /// Majority over `PES_DRAWS` draws.
    pub fn decide(&self, rng: &mut dyn RngCore) -> Result<bool> {
        let mut accepts = 0;
        for _ in 0..PES_DRAWS {
            accepts += usize::from(self.draw_vote(rng)?);
        }
        Ok(2 * accepts > PES_DRAWS)
    }
}

pub fn decide_via_pes(u: &Circuit, x: &BasisLabel, oracle: &dyn PhaseOracle, rng: &mut dyn RngCore) -> Result<bool> {
    PesDecider::new(u, x, oracle)?.decide(rng)
}

/// Estimates `⟨x|V|x⟩` for `V = U·Z·U†` at `ε = 1/4`, `δ = 1/100` and
/// accepts when the real part is negative.
pub fn decide_via_luae(u: &Circuit, x: &BasisLabel, oracle: &dyn LuaeOracle, rng: &mut dyn RngCore) -> Result<bool> {
    let mc = mark_circuit(u, MarkKind::PeReflect)?;
    let req = SamplingRequest::new(0.25, 0.01, BasisLabel::new(x.bits.clone(), 0))?;
    let lambda = oracle.estimate(&mc.full, &req, rng)?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::OracleFailure(format!("estimate {lambda} is not finite")));
    }
    Ok(lambda.re < 0.0)
}
