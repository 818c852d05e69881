//! Constant shifts of the secular polynomial and the way the island ends.
//!
//! Adding `epsilon` to `det(E - H)` breaks the exact factorization of the
//! loop model. Walking `z` down from inside the island, the first loss of
//! reality then happens either through the central pair of levels or
//! through two non-central pairs at once, depending on the sign of `epsilon`.

use serde::Serialize;

use super::{loop_hamiltonian, record, validate_grid, ScanRecord};
use crate::charpoly::characteristic_polynomial;
use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::polynomial::{polynomial_roots, Polynomial};

/// Default size of the constant shift.
pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Only the two middle levels merge.
    CentralPair,
    /// Two pairs merge together, neither of them the middle one.
    TwoNoncentralPairs,
    Other,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::CentralPair => "central-pair",
            Scenario::TwoNoncentralPairs => "two-noncentral-pairs",
            Scenario::Other => "other",
        }
    }
}

/// Loss of reality while walking `z` downward from a fully real point.
///
/// Pairs that merge in close succession are resolved as one event: the
/// walk continues while the number of non-real levels keeps growing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Onset {
    /// First grid point with a non-real level.
    pub z: f64,
    /// Grid point where the non-real count stops growing.
    pub settled_z: f64,
    /// 0-based positions of the non-real levels in the sorted spectrum at
    /// `settled_z`.
    pub complex_levels: Vec<usize>,
}

fn complex_levels(r: &ScanRecord) -> Vec<usize> {
    Spectrum::new(r.eigenvalues.clone())
        .reality_flags()
        .iter()
        .enumerate()
        .filter(|(_, &f)| !f)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub epsilon: f64,
    /// In descending `z`.
    pub records: Vec<ScanRecord>,
    pub onset: Option<Onset>,
    pub scenario: Option<Scenario>,
}

impl PerturbationReport {
    /// Same layout as a scan, rows in ascending `z`.
    pub fn to_csv(&self) -> String {
        let ascending: Vec<ScanRecord> = self.records.iter().rev().cloned().collect();
        super::records_to_csv(&ascending)
    }
}

/// Roots of `det(E - H^(3)(gamma, gamma; z)) + epsilon`.
pub fn perturbed_spectrum(gamma: f64, z: f64, epsilon: f64) -> Result<Spectrum> {
    if !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} is not finite")));
    }
    let h = loop_hamiltonian(gamma, 0.0, z)?;
    let p = characteristic_polynomial(&h)?;
    let mut coeffs = p.coeffs().to_vec();
    coeffs[0] += epsilon;
    Ok(Spectrum::new(polynomial_roots(&Polynomial::new(coeffs))?))
}

fn classify(complex_levels: &[usize], dim: usize) -> Scenario {
    if !complex_levels.len().is_multiple_of(2) {
        return Scenario::Other;
    }
    let pairs: Vec<(usize, usize)> = complex_levels.chunks(2).map(|c| (c[0], c[1])).collect();
    if pairs.iter().any(|&(a, b)| b != a + 1) {
        return Scenario::Other;
    }
    let central = (dim / 2 - 1, dim / 2);
    match pairs.as_slice() {
        [p] if *p == central => Scenario::CentralPair,
        [p, q] if *p != central && *q != central => Scenario::TwoNoncentralPairs,
        _ => Scenario::Other,
    }
}

/// Walks the grid from its largest `z` downward and classifies the first
/// complexification that follows a fully real point.
pub fn perturbation_scenarios(gamma: f64, z_grid: &[f64], epsilon: f64) -> Result<PerturbationReport> {
    validate_grid(z_grid)?;
    let mut records = Vec::with_capacity(z_grid.len());
    for &z in z_grid.iter().rev() {
        let s = perturbed_spectrum(gamma, z, epsilon).map_err(|e| Error::ScanPoint { z, source: Box::new(e) })?;
        records.push(record(z, &s));
    }
    let mut onset = None;
    let mut seen_real = false;
    for (k, r) in records.iter().enumerate() {
        if r.n_real == r.eigenvalues.len() {
            seen_real = true;
        } else if seen_real {
            let mut settled = k;
            while settled + 1 < records.len() && records[settled + 1].n_real < records[settled].n_real {
                settled += 1;
            }
            let at = &records[settled];
            onset = Some(Onset { z: r.z, settled_z: at.z, complex_levels: complex_levels(at) });
            break;
        }
    }
    let scenario = onset.as_ref().map(|o| classify(&o.complex_levels, records[0].eigenvalues.len()));
    Ok(PerturbationReport { epsilon, records, onset, scenario })
}
