//! Exact spectral distributions and the `(ε, δ)`-approximation check.
//!
//! `q` approximates `p` when `q` splits as `q_i = Σ_j q_ij` with, for every
//! `j`, at least `(1 − δ)·p_j` of mass routed from points within `ε` of
//! `x_j`. That is a transportation problem, decided here by max flow.

mod flow;

pub use flow::{max_flow, solve, FlowNetwork, FlowSolution};

use rand::Rng;

use crate::circuit::BasisLabel;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, unitary_eig, ComplexMatrix, SpectrumKind};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Phases on the unit circle, `d(a, b) = min(|a − b| mod 1, 1 − …)`.
    Circular,
    Absolute,
}

impl Metric {
    pub fn distance(self, a: f64, b: f64) -> f64 {
        match self {
            Metric::Absolute => (a - b).abs(),
            Metric::Circular => {
                let d = (a - b).rem_euclid(1.0);
                d.min(1.0 - d)
            }
        }
    }
}

/// Finite distribution of real values, sorted, with values closer than
/// `DEDUP` merged.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDistribution {
    points: Vec<(f64, f64)>,
    metric: Metric,
}

impl SpectralDistribution {
    pub fn new(points: Vec<(f64, f64)>, metric: Metric) -> Result<Self> {
        let mut total = 0.0;
        for &(value, weight) in &points {
            if !value.is_finite() || weight.is_nan() || weight < 0.0 {
                return Err(Error::invalid(format!("bad point ({value}, {weight})")));
            }
            total += weight;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self {
            points: merge(points, metric),
            metric,
        })
    }

    /// Empirical distribution of a sample list.
    pub fn from_samples(samples: &[f64], metric: Metric) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("no samples"));
        }
        let w = 1.0 / samples.len() as f64;
        let points: Vec<(f64, f64)> = samples.iter().map(|&s| (s, w)).collect();
        let mut d = Self::new(points, metric)?;
        // repair the rounding of n·(1/n)
        let total: f64 = d.points.iter().map(|p| p.1).sum();
        d.points.iter_mut().for_each(|p| p.1 /= total);
        Ok(d)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total weight within `radius` of `center`.
    pub fn mass_near(&self, center: f64, radius: f64) -> f64 {
        self.points
            .iter()
            .filter(|(v, _)| self.metric.distance(*v, center) <= radius + tolerance::DISTANCE_SLACK)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Sorts by value and merges runs of values within `DEDUP` of their neighbour;
/// on the circle the last run may also merge into the first.
fn merge(points: Vec<(f64, f64)>, metric: Metric) -> Vec<(f64, f64)> {
    let mut points: Vec<(f64, f64)> = points
        .into_iter()
        .map(|(v, w)| match metric {
            Metric::Circular => (v.rem_euclid(1.0), w),
            Metric::Absolute => (v, w),
        })
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    let mut last = f64::NAN;
    for (v, w) in points {
        match merged.last_mut() {
            Some(top) if v - last <= tolerance::DEDUP => {
                top.1 += w;
            }
            _ => merged.push((v, w)),
        }
        last = v;
    }
    if metric == Metric::Circular && merged.len() > 1 {
        let first = merged[0].0;
        let end = merged[merged.len() - 1].0;
        if first + 1.0 - end <= tolerance::DEDUP {
            let (_, w) = merged.pop().expect("nonempty");
            merged[0].1 += w;
        }
    }
    merged
}

/// Row of the label `b` inside a matrix of dimension `dim`: a plain qubit
/// label, or a qubit label with a clock register filling the remaining factor.
fn label_row(b: &BasisLabel, dim: usize) -> Result<usize> {
    let qubit_dim = 1usize << b.len();
    if !dim.is_multiple_of(qubit_dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: qubit_dim,
        });
    }
    let clock_dim = dim / qubit_dim;
    if b.clock_index >= clock_dim {
        return Err(Error::invalid(format!(
            "clock index {} out of range for clock dimension {clock_dim}",
            b.clock_index
        )));
    }
    Ok(b.amplitude_index(clock_dim))
}

/// `{(λ, ⟨b|Π_λ|b⟩)}` for Hermitian `A`, or `{(φ, ⟨b|Π_φ|b⟩)}` for unitary `A`.
/// Weights at or below `WEIGHT_FLOOR` are dropped and the rest renormalized.
pub fn exact_distribution(a: &ComplexMatrix, b: &BasisLabel, kind: SpectrumKind) -> Result<SpectralDistribution> {
    let row = label_row(b, a.rows())?;
    let (decomposition, values, metric) = match kind {
        SpectrumKind::Hermitian => {
            let d = hermitian_eig(a)?;
            let v = d.real_eigenvalues();
            (d, v, Metric::Absolute)
        }
        SpectrumKind::Unitary => {
            let d = unitary_eig(a)?;
            let v = d.phases();
            (d, v, Metric::Circular)
        }
    };
    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, decomposition.eigenvectors[(row, k)].norm_sqr()))
        .collect();
    let kept: Vec<(f64, f64)> = merge(points, metric)
        .into_iter()
        .filter(|&(_, w)| w > tolerance::WEIGHT_FLOOR)
        .collect();
    let total: f64 = kept.iter().map(|p| p.1).sum();
    SpectralDistribution::new(kept.into_iter().map(|(v, w)| (v, w / total)).collect(), metric)
}

/// One draw by inverse CDF over the point list.
pub fn exact_sampler<R: Rng + ?Sized>(d: &SpectralDistribution, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(value, weight) in &d.points {
        acc += weight;
        if u < acc {
            return value;
        }
    }
    d.points.last().expect("distributions are nonempty").0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxCheckInstance {
    /// Target.
    pub p: SpectralDistribution,
    /// Candidate.
    pub q: SpectralDistribution,
    pub epsilon: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxCheck {
    pub feasible: bool,
    pub flow: f64,
    /// `Σ_j (1 − δ)·p_j`.
    pub demand: f64,
    /// `witness[i][j] = q_ij` when feasible.
    pub witness: Option<Vec<Vec<f64>>>,
}

pub fn approx_check(inst: &ApproxCheckInstance) -> Result<ApproxCheck> {
    if inst.p.metric != inst.q.metric {
        return Err(Error::MetricMismatch);
    }
    let metric = inst.p.metric;
    let keep = (1.0 - inst.delta).max(0.0);
    let demands: Vec<f64> = inst.p.points.iter().map(|&(_, w)| keep * w).collect();
    let supplies: Vec<f64> = inst.q.points.iter().map(|&(_, w)| w).collect();
    let mut edges = Vec::new();
    for (i, &(x, _)) in inst.q.points.iter().enumerate() {
        for (j, &(y, _)) in inst.p.points.iter().enumerate() {
            if metric.distance(x, y) <= inst.epsilon + tolerance::DISTANCE_SLACK {
                edges.push((i, j));
            }
        }
    }
    let net = FlowNetwork {
        supplies,
        demands,
        edges,
    };
    let solution = solve(&net);
    let demand: f64 = net.demands.iter().sum();
    // one scaling quantum of rounding per sink
    let quantum = net.demands.len() as f64 / tolerance::FLOW_SCALE;
    let feasible = solution.value >= demand - quantum;
    let witness = feasible.then(|| {
        let mut plan = vec![vec![0.0; net.demands.len()]; net.supplies.len()];
        for (&(i, j), &f) in net.edges.iter().zip(&solution.edge_flows) {
            plan[i][j] += f;
        }
        // mass not needed by any demand is parked on the first target point
        for (i, row) in plan.iter_mut().enumerate() {
            let used: f64 = row.iter().sum();
            if let Some(first) = row.first_mut() {
                *first += (net.supplies[i] - used).max(0.0);
            }
        }
        plan
    });
    Ok(ApproxCheck {
        feasible,
        flow: solution.value,
        demand,
        witness,
    })
}

/// Slack added to `δ` when checking `n` samples against a target with
/// `points` support points: `3·√(ln(max(points, 2))/n)`.
pub fn empirical_slack(points: usize, samples: usize) -> f64 {
    tolerance::EMPIRICAL_SLACK_FACTOR * ((points.max(2) as f64).ln() / samples as f64).sqrt()
}

/// Minimum sample count for [`empirical_approx_check`].
pub const MIN_EMPIRICAL_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCheck {
    pub feasible: bool,
    pub slack: f64,
    pub flow: f64,
}

/// Runs [`approx_check`] on the empirical law of `samples` with `δ + slack`;
/// `slack` defaults to [`empirical_slack`].
pub fn empirical_approx_check(
    samples: &[f64],
    target: &SpectralDistribution,
    epsilon: f64,
    delta: f64,
    slack: Option<f64>,
) -> Result<EmpiricalCheck> {
    if samples.len() < MIN_EMPIRICAL_SAMPLES {
        return Err(Error::invalid(format!(
            "{} samples given, at least {MIN_EMPIRICAL_SAMPLES} needed",
            samples.len()
        )));
    }
    let slack = slack.unwrap_or_else(|| empirical_slack(target.len(), samples.len()));
    let q = SpectralDistribution::from_samples(samples, target.metric)?;
    let check = approx_check(&ApproxCheckInstance {
        p: target.clone(),
        q,
        epsilon,
        delta: delta + slack,
    })?;
    Ok(EmpiricalCheck {
        feasible: check.feasible,
        slack,
        flow: check.flow,
    })
}

/// `½ Σ_x |p(x) − q(x)|`, matching points that are within `DEDUP`.
pub fn total_variation(p: &SpectralDistribution, q: &SpectralDistribution) -> Result<f64> {
    if p.metric != q.metric {
        return Err(Error::MetricMismatch);
    }
    let mut points: Vec<(f64, f64)> = p.points.clone();
    points.extend(q.points.iter().map(|&(v, w)| (v, -w)));
    let diff = merge(points, p.metric);
    Ok(0.5 * diff.iter().map(|(_, w)| w.abs()).sum::<f64>())
}
