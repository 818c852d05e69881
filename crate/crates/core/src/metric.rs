//! Metric operators `Theta` with `Theta H = H^T Theta`.
//!
//! A real symmetric positive definite `Theta` of this kind turns `H` into a
//! self-adjoint operator for the inner product `<u, v> = u^T Theta v`. Two
//! constructions are provided: an explicit sum over left eigenvectors with
//! positive weights, and the full linear space of symmetric intertwiners.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{eigenvalues, null_vectors};
use crate::error::{Error, Result};
use crate::matrix::SquareRealMatrix;

/// Eigenvalues closer than this (relative to `max(1, |E|)`) are treated as
/// one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Largest dimension accepted by [`intertwining_basis`].
pub const INTERTWINING_MAX_DIM: usize = 16;

const NULL_TOL: f64 = 1e-10;
const EIGENVECTOR_TOL: f64 = 1e-7;
const GRAM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricCandidate {
    pub theta: SquareRealMatrix,
    /// Real eigenvalues of `H`, ascending, one per weight.
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MetricCandidate {
    pub fn validity(&self, h: &SquareRealMatrix) -> Result<ValidityReport> {
        ValidityReport::check(&self.theta, h)
    }
}

/// Outcome of [`ValidityReport::verdict`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricValidity {
    Valid,
    NotSymmetric,
    NotIntertwining,
    NotPositiveDefinite,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityReport {
    pub symmetric: bool,
    pub spd: bool,
    /// `||Theta H - H^T Theta||_F / (||Theta||_F ||H||_F)`
    pub residual: f64,
    pub min_eigenvalue: f64,
    /// Per row, the largest `|i - j|` with a non-negligible `Theta_ij`.
    pub bandwidth_profile: Vec<usize>,
}

impl ValidityReport {
    pub fn check(theta: &SquareRealMatrix, h: &SquareRealMatrix) -> Result<Self> {
        let n = h.dim();
        if theta.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: theta.dim() });
        }
        let t = theta.as_dmatrix();
        let hm = h.as_dmatrix();
        let scale = theta.max_abs().max(f64::MIN_POSITIVE);
        let symmetric = theta.asymmetry() <= 1e-10 * scale;
        let commutator = t * hm - hm.transpose() * t;
        let denom = (theta.frobenius_norm() * h.frobenius_norm()).max(f64::MIN_POSITIVE);
        let residual = commutator.norm() / denom;
        let sym = (t + t.transpose()) * 0.5;
        let min_eigenvalue = sym.symmetric_eigenvalues().min();
        let spd = symmetric && min_eigenvalue > 1e-12 * scale;
        let bandwidth_profile = (0..n)
            .map(|i| (0..n).filter(|&j| t[(i, j)].abs() > 1e-12 * scale).map(|j| i.abs_diff(j)).max().unwrap_or(0))
            .collect();
        Ok(Self { symmetric, spd, residual, min_eigenvalue, bandwidth_profile })
    }

    pub fn verdict(&self, residual_tol: f64) -> MetricValidity {
        if !self.symmetric {
            MetricValidity::NotSymmetric
        } else if self.residual > residual_tol {
            MetricValidity::NotIntertwining
        } else if !self.spd {
            MetricValidity::NotPositiveDefinite
        } else {
            MetricValidity::Valid
        }
    }
}

struct Cluster {
    energy: f64,
    indices: Vec<usize>,
}

fn cluster_spectrum(spectrum: &[Complex64]) -> Result<Vec<Cluster>> {
    let mut clusters: Vec<(Vec<Complex64>, Vec<usize>)> = Vec::new();
    for (i, &e) in spectrum.iter().enumerate() {
        let close = clusters.last().is_some_and(|(members, _)| {
            let last = members[members.len() - 1];
            (e - last).norm() <= CLUSTER_TOL * e.norm().max(1.0)
        });
        if close {
            let c = clusters.last_mut().expect("non-empty");
            c.0.push(e);
            c.1.push(i);
        } else {
            clusters.push((vec![e], vec![i]));
        }
    }
    let n_real = spectrum.iter().filter(|e| crate::eigen::is_real(**e, crate::eigen::REALITY_TOL)).count();
    clusters
        .into_iter()
        .map(|(members, indices)| {
            let center = members.iter().sum::<Complex64>() / members.len() as f64;
            // a conjugate pair split by rounding at an exceptional point has a real center
            if center.im.abs() > CLUSTER_TOL * center.norm().max(1.0) {
                return Err(Error::ComplexSpectrum { n_real, dim: spectrum.len() });
            }
            Ok(Cluster { energy: center.re, indices })
        })
        .collect()
}

/// `Theta = sum_n eta_n l_n l_n^T` over left eigenvectors normalized so that
/// `l_n^T r_n = 1` for unit right eigenvectors `r_n`.
///
/// `weights` default to all ones. Fails with [`Error::ComplexSpectrum`] when
/// `H` has complex eigenvalues and with [`Error::Defective`] at an
/// exceptional point.
pub fn metric_from_left_eigenvectors(h: &SquareRealMatrix, weights: Option<&[f64]>) -> Result<MetricCandidate> {
    let n = h.dim();
    let weights = match weights {
        Some(w) if w.len() != n => return Err(Error::WeightCount { expected: n, got: w.len() }),
        Some(w) => w.to_vec(),
        None => vec![1.0; n],
    };
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::NonPositiveWeight);
    }
    let spectrum = eigenvalues(h)?;
    let clusters = cluster_spectrum(spectrum.eigenvalues())?;
    let hm = h.as_dmatrix();
    let ht = hm.transpose();
    let mut theta = DMatrix::<f64>::zeros(n, n);
    let mut energies = vec![0.0; n];
    for cluster in clusters {
        let m = cluster.indices.len();
        let (rights, r_sigma) = null_vectors(hm, cluster.energy, m);
        let (lefts, l_sigma) = null_vectors(&ht, cluster.energy, m);
        let defective = Error::Defective { energy: cluster.energy };
        if r_sigma.iter().chain(&l_sigma).any(|&s| s > EIGENVECTOR_TOL) {
            return Err(defective);
        }
        let r = DMatrix::from_columns(&rights);
        let l = DMatrix::from_columns(&lefts);
        let gram = l.transpose() * &r;
        let sv = gram.singular_values();
        if sv.min() < GRAM_TOL * sv.max().max(1.0) {
            return Err(defective);
        }
        let gram_inv_t = gram.try_inverse().ok_or(defective)?.transpose();
        let l_tilde = l * gram_inv_t;
        let energy = if m == 1 {
            let (lv, rv) = (l_tilde.column(0), r.column(0));
            (lv.transpose() * hm * rv)[(0, 0)] / lv.dot(&rv)
        } else {
            cluster.energy
        };
        for (col, &idx) in cluster.indices.iter().enumerate() {
            let lv = l_tilde.column(col);
            theta += weights[idx] * (lv * lv.transpose());
            energies[idx] = energy;
        }
    }
    let theta = (&theta + theta.transpose()) * 0.5;
    Ok(MetricCandidate { theta: SquareRealMatrix::from_dmatrix(theta)?, energies, weights })
}

fn symmetric_unit(n: usize, p: usize, q: usize) -> DMatrix<f64> {
    let mut b = DMatrix::<f64>::zeros(n, n);
    if p == q {
        b[(p, p)] = 1.0;
    } else {
        let v = std::f64::consts::FRAC_1_SQRT_2;
        b[(p, q)] = v;
        b[(q, p)] = v;
    }
    b
}

/// Frobenius-orthonormal basis of all symmetric `Theta` with
/// `Theta H = H^T Theta`.
pub fn intertwining_basis(h: &SquareRealMatrix) -> Result<Vec<SquareRealMatrix>> {
    let n = h.dim();
    if n > INTERTWINING_MAX_DIM {
        return Err(Error::DimensionGuard { dim: n, max: INTERTWINING_MAX_DIM });
    }
    let hm = h.as_dmatrix();
    let unknowns: Vec<(usize, usize)> = (0..n).flat_map(|p| (p..n).map(move |q| (p, q))).collect();
    let equations: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).collect();
    // padded to square so that the SVD returns a complete right basis
    let size = unknowns.len().max(equations.len());
    let mut a = DMatrix::<f64>::zeros(size, size);
    for (col, &(p, q)) in unknowns.iter().enumerate() {
        let b = symmetric_unit(n, p, q);
        let c = &b * hm - hm.transpose() * &b;
        for (row, &(i, j)) in equations.iter().enumerate() {
            a[(row, col)] = c[(i, j)];
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max().max(f64::MIN_POSITIVE);
    let mut basis = Vec::new();
    for (k, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma >= NULL_TOL * sigma_max {
            continue;
        }
        let mut theta = DMatrix::<f64>::zeros(n, n);
        for (col, &(p, q)) in unknowns.iter().enumerate() {
            theta += v_t[(k, col)] * symmetric_unit(n, p, q);
        }
        basis.push(SquareRealMatrix::from_dmatrix(theta)?);
    }
    Ok(basis)
}

fn combine(basis: &[SquareRealMatrix], coeffs: &DVector<f64>) -> DMatrix<f64> {
    let n = basis[0].dim();
    basis.iter().zip(coeffs.iter()).fold(DMatrix::zeros(n, n), |acc, (b, &c)| acc + b.as_dmatrix() * c)
}

fn lowest_pair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = m.clone().symmetric_eigen();
    let i = eig.eigenvalues.imin();
    (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned())
}

/// Searches the span of `basis` for a positive definite member by
/// maximizing the smallest eigenvalue over unit coefficient vectors.
/// Returns `None` when no member with a clearly positive spectrum is found.
pub fn spd_member(basis: &[SquareRealMatrix]) -> Option<SquareRealMatrix> {
    if basis.is_empty() {
        return None;
    }
    let k = basis.len();
    let mut c = DVector::from_iterator(k, basis.iter().map(|b| b.trace()));
    if c.norm() < 1e-12 {
        c = DVector::zeros(k);
        c[0] = 1.0;
    }
    c.normalize_mut();
    let (mut best_value, _) = lowest_pair(&combine(basis, &c));
    let mut best = c.clone();
    for step in 0..2000 {
        let (value, v) = lowest_pair(&combine(basis, &c));
        if value > best_value {
            best_value = value;
            best = c.clone();
        }
        let grad = DVector::from_iterator(k, basis.iter().map(|b| (v.transpose() * b.as_dmatrix() * &v)[(0, 0)]));
        // the projected gradient vanishes at a stationary point of the sphere
        let tangent = &grad - &c * c.dot(&grad);
        if tangent.norm() < 1e-14 {
            break;
        }
        c += tangent * (0.5 / ((step + 1) as f64).sqrt());
        c.normalize_mut();
    }
    if best_value <= 1e-9 {
        return None;
    }
    SquareRealMatrix::from_dmatrix(combine(basis, &best)).ok()
}

/// `u^T Theta v`, after checking that `Theta` is symmetric positive definite.
pub fn inner_product(theta: &SquareRealMatrix, u: &[f64], v: &[f64]) -> Result<f64> {
    let n = theta.dim();
    for len in [u.len(), v.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    if !theta.is_symmetric(1e-10 * theta.max_abs().max(f64::MIN_POSITIVE)) {
        return Err(Error::NotPositiveDefinite);
    }
    if theta.as_dmatrix().clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    let u = DVector::from_column_slice(u);
    let v = DVector::from_column_slice(v);
    Ok(u.dot(&(theta.as_dmatrix() * v)))
}
