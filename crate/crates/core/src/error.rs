use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty lattice: chain half-size K must be at least 1")]
    EmptyLattice,

    #[error("loop graph needs wedge length K >= 2, got K = {0}")]
    LoopTooShort(usize),

    #[error("coupling `{name}` is not defined for a {kind} graph")]
    UnexpectedCoupling { name: &'static str, kind: &'static str },

    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix dimension {dim} exceeds the limit {max} for this operation")]
    DimensionGuard { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial must have degree >= 1 and a non-zero leading coefficient")]
    DegeneratePolynomial,

    #[error("polynomial root iteration did not converge after {0} sweeps")]
    RootsNoConvergence(usize),

    #[error("QR iteration did not converge after {0} iterations")]
    QrNoConvergence(usize),

    #[error("eigenvalue computation failed at z = {z}: {source}")]
    ScanPoint {
        z: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid bracket [{lo}, {hi}]: {count} real eigenvalues at both ends")]
    InvalidBracket { lo: f64, hi: f64, count: usize },

    #[error("boundary parameter y = {0} outside [-(1+sqrt 5)/2, -1]")]
    BoundaryRange(f64),

    #[error("mu_hat = {0} has no point on the island boundary")]
    NoBoundaryPoint(f64),

    #[error("spectrum is not real ({n_real} of {dim} levels real); no real metric exists")]
    ComplexSpectrum { n_real: usize, dim: usize },

    #[error("hamiltonian is not diagonalizable near E = {energy} (exceptional point)")]
    Defective { energy: f64 },

    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },

    #[error("metric weights must be positive and finite")]
    NonPositiveWeight,

    #[error("metric is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
