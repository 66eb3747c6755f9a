//! Numerical tolerances shared across the crate. Tests refer to these by name.

/// Hermiticity check used as a precondition for eigensolvers and exponentials.
pub const HERMITIAN: f64 = 1e-10;

/// Unitarity check used as a precondition for `unitary_eig` and gate construction.
pub const UNITARY: f64 = 1e-10;

/// Jacobi sweeps stop once the off-diagonal Frobenius norm falls below this
/// fraction of the input's Frobenius norm.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-12;

/// Upper bound on cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues of the Hermitian part closer than this (relative to the spectral
/// scale) are grouped into one eigenspace during the unitary eigensolver.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Unitarity tolerance for custom gate matrices read from text.
pub const PARSE_UNITARY: f64 = 1e-8;

/// Hermiticity tolerance for Hamiltonian terms read from text.
pub const PARSE_HERMITIAN: f64 = 1e-8;

/// State vectors must have unit norm to within this.
pub const NORM: f64 = 1e-10;

/// Residual bound for `phase_estimate`'s eigenvector precondition.
pub const EIGENVECTOR: f64 = 1e-8;

/// Spectral points closer than this are merged in an exact distribution.
pub const DEDUP: f64 = 1e-9;

/// Spectral points whose weight is at most this are dropped from an exact distribution.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Capacities are multiplied by this and rounded before integer max-flow.
pub const FLOW_SCALE: f64 = 1e12;

/// Distances within this of `ε` still count as inside the `ε`-ball.
pub const DISTANCE_SLACK: f64 = 1e-12;

/// Multiplier of the finite-sample slack `c·sqrt(ln(points) / samples)`.
pub const EMPIRICAL_SLACK_FACTOR: f64 = 3.0;
