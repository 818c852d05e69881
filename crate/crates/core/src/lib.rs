//! Discrete non-Hermitian quantum-graph Hamiltonians and their spectra.
//!
//! The crate builds the chain and one-loop lattice Hamiltonians, computes
//! their characteristic polynomials and eigenvalues, locates exceptional
//! points, traces the analytic boundary of the strong-coupling stability
//! island and constructs metric operators that make a real-spectrum
//! Hamiltonian self-adjoint in a modified inner product.
//!
//! Module map:
//!
//! * [`graph`]: matrix constructors and the serializable [`GraphSpec`].
//! * [`polynomial`]: the [`Polynomial`] type and the Aberth–Ehrlich root finder.
//! * [`charpoly`]: characteristic polynomials and the closed-form secular factors.
//! * [`eigen`]: balancing, Hessenberg reduction and double-shift QR.
//! * [`stability`]: scans, exceptional points, island boundary, perturbations.
//! * [`metric`]: metric operators and the metric-weighted inner product.

// Dense kernels index several arrays by the same loop counter.
#![allow(clippy::needless_range_loop)]

pub mod charpoly;
pub mod eigen;
pub mod error;
pub mod format;
pub mod graph;
pub mod matrix;
pub mod metric;
pub mod polynomial;
pub mod stability;

pub use charpoly::{
    characteristic_polynomial, degenerate_secular, quartic_minus, quartic_plus, reduced_secular,
    reduced_secular_scale, ReducedParameters,
};
pub use eigen::{classify_reality, eigenvalues, is_real, RealityClassification, Spectrum, REALITY_TOL};
pub use error::{Error, Result};
pub use graph::{
    build_coupled_chain, build_free_chain, build_loop_graph, reparameterize, Couplings, GraphKind,
    GraphSpec, ParameterPoint,
};
pub use matrix::SquareRealMatrix;
pub use metric::{
    inner_product, intertwining_basis, metric_from_left_eigenvectors, MetricCandidate,
    MetricValidity, ValidityReport,
};
pub use num_complex::Complex64;
pub use polynomial::{clustered_roots, polynomial_roots, root_clusters, Polynomial, RootCluster};
pub use stability::{
    boundary_curve, boundary_lambda_hat_max, boundary_mu_hat, find_exceptional_point,
    minus_quartet_lambda_max, perturbation_scenarios, scan_z, verify_boundary, BoundaryBranch,
    BoundarySample, BoundaryVerdict, PerturbationReport, ScanResult, Scenario,
};
