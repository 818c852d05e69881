//! Parameter scans, exceptional points and the strong-coupling stability island.

mod boundary;
mod perturbation;

pub use boundary::{
    boundary_curve, boundary_lambda_hat_max, boundary_mu_hat, boundary_sample,
    boundary_sample_for_mu_hat, boundary_to_csv, effective_z_max, minus_quartet_lambda_max,
    minus_quartet_z_max, verify_boundary, BoundaryBranch, BoundarySample, BoundaryVerdict,
    MinusQuartetEdge, DEFAULT_MARGIN, GOLDEN_RATIO,
};
pub use perturbation::{
    perturbation_scenarios, perturbed_spectrum, Onset, PerturbationReport, Scenario, DEFAULT_EPSILON,
};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{count_real, eigenvalues, Spectrum};
use crate::error::{Error, Result};
use crate::format::format_value;
use crate::graph::{build_coupled_chain, build_loop_graph};
use crate::matrix::SquareRealMatrix;

/// Bisection stops once the bracket is narrower than this.
pub const EP_WIDTH: f64 = 1e-10;

/// Wedge length of the model whose secular equation factorizes.
pub const LOOP_K: usize = 3;

/// Loop Hamiltonian `H^(3)(gamma + delta, gamma - delta; z)`.
pub fn loop_hamiltonian(gamma: f64, delta: f64, z: f64) -> Result<SquareRealMatrix> {
    build_loop_graph(LOOP_K, gamma + delta, gamma - delta, z)
}

/// One grid point of a scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub z: f64,
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub n_real: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub gamma: f64,
    pub delta: f64,
    pub records: Vec<ScanRecord>,
}

impl ScanResult {
    pub fn grid(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.z).collect()
    }

    pub fn n_real(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.n_real).collect()
    }

    /// Columns `z, ReE_1..ReE_N, ImE_1..ImE_N, n_real`.
    pub fn to_csv(&self) -> String {
        records_to_csv(&self.records)
    }
}

pub(crate) fn records_to_csv(records: &[ScanRecord]) -> String {
    let n = records.first().map_or(0, |r| r.eigenvalues.len());
    let mut header = vec!["z".to_string()];
    header.extend((1..=n).map(|i| format!("ReE_{i}")));
    header.extend((1..=n).map(|i| format!("ImE_{i}")));
    header.push("n_real".to_string());
    let mut out = header.join(",");
    out.push('\n');
    for r in records {
        let mut cells = vec![format_value(r.z)];
        cells.extend(r.eigenvalues.iter().map(|e| format_value(e.re)));
        cells.extend(r.eigenvalues.iter().map(|e| format_value(e.im)));
        cells.push(r.n_real.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Checks that a grid is non-empty, finite and strictly increasing.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite grid value {x}")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!("grid not strictly increasing at {} -> {}", w[0], w[1])));
    }
    Ok(())
}

/// `start, start + step, ...` up to `stop` inclusive (within half a step).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(Error::InvalidGrid(format!("{start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 0.5).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// `n` evenly spaced points on `[start, stop]`, endpoints included.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Spectra of arbitrary `z`-dependent matrices over a grid, evaluated in
/// parallel and returned in grid order.
pub fn scan_with<F>(grid: &[f64], build: F) -> Result<Vec<ScanRecord>>
where
    F: Fn(f64) -> Result<SquareRealMatrix> + Sync,
{
    validate_grid(grid)?;
    grid.par_iter()
        .map(|&z| {
            let s = build(z)
                .and_then(|m| eigenvalues(&m))
                .map_err(|e| Error::ScanPoint { z, source: Box::new(e) })?;
            Ok(record(z, &s))
        })
        .collect()
}

pub(crate) fn record(z: f64, s: &Spectrum) -> ScanRecord {
    ScanRecord { z, eigenvalues: s.eigenvalues().to_vec(), n_real: s.n_real() }
}

/// Spectrum of `H^(3)(gamma + delta, gamma - delta; z)` along a `z` grid.
pub fn scan_z(gamma: f64, delta: f64, z_grid: &[f64]) -> Result<ScanResult> {
    let records = scan_with(z_grid, |z| loop_hamiltonian(gamma, delta, z))?;
    Ok(ScanResult { gamma, delta, records })
}

/// Bisection on an integer-valued reality count.
///
/// Requires `count(lo) != count(hi)`. Keeps the half whose endpoint counts
/// still differ until the bracket is narrower than `width`, then returns its
/// midpoint.
pub fn bisect_reality_change<F>(lo: f64, hi: f64, width: f64, count: F) -> Result<f64>
where
    F: Fn(f64) -> Result<usize>,
{
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi || width <= 0.0 {
        return Err(Error::InvalidParameter(format!("bracket [{lo}, {hi}] with width {width}")));
    }
    let (mut lo, mut hi) = (lo, hi);
    let n_lo = count(lo)?;
    let n_hi = count(hi)?;
    if n_lo == n_hi {
        return Err(Error::InvalidBracket { lo, hi, count: n_lo });
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid)? == n_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exceptional point of the `K = 3` loop along `z` at fixed `(gamma, delta)`.
pub fn find_exceptional_point(gamma: f64, delta: f64, z_lo: f64, z_hi: f64) -> Result<f64> {
    bisect_reality_change(z_lo, z_hi, EP_WIDTH, |z| count_real(&loop_hamiltonian(gamma, delta, z)?))
}

/// Exceptional point of the coupled chain `H^(2K)(nu)` along `nu`.
pub fn find_chain_exceptional_point(k: usize, nu_lo: f64, nu_hi: f64) -> Result<f64> {
    bisect_reality_change(nu_lo, nu_hi, EP_WIDTH, |nu| count_real(&build_coupled_chain(k, nu)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[0.0, 0.0]).is_err());
        assert!(validate_grid(&[1.0, 0.5]).is_err());
        assert!(validate_grid(&[0.0, f64::NAN]).is_err());
        assert!(validate_grid(&[0.0, 0.1, 0.2]).is_ok());
        assert!(scan_z(0.0, 0.0, &[]).is_err());
    }

    #[test]
    fn linear_grid_includes_stop() {
        let g = linear_grid(0.0, 2.0, 0.005).unwrap();
        assert_eq!(g.len(), 401);
        assert!((g[400] - 2.0).abs() < 1e-12);
        assert_eq!(linear_grid(1.0, 1.0, 0.1).unwrap(), vec![1.0]);
        assert!(linear_grid(1.0, 0.0, 0.1).is_err());
        assert!(linear_grid(0.0, 1.0, 0.0).is_err());
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn weak_coupling_transition_at_unit_z() {
        let grid = linear_grid(0.0, 2.0, 0.005).unwrap();
        let scan = scan_z(0.0, 0.0, &grid).unwrap();
        for r in &scan.records {
            let z = r.z;
            // the minus-quartet pair complexifies at sqrt(1 + lambda_max) ~ 1.068
            let expected = if z <= 1.0 {
                8
            } else if z <= 1.068 {
                6
            } else {
                4
            };
            if (z - 1.0).abs() > 1e-9 {
                assert_eq!(r.n_real, expected, "z = {z}");
            }
        }
    }

    #[test]
    fn near_degenerate_below_unit_gamma() {
        let grid = linear_grid(0.0, 0.99, 0.01).unwrap();
        let scan = scan_z(0.98, 0.0, &grid).unwrap();
        assert!(scan.records.iter().all(|r| r.n_real == 8));
        // lowest two levels form a close doublet
        let r = &scan.records[50];
        assert!(r.eigenvalues[1].re - r.eigenvalues[0].re < 0.2);
    }

    #[test]
    fn missing_pair_in_mixed_regime() {
        let grid = linear_grid(0.05, 0.95, 0.05).unwrap();
        let scan = scan_z(1.035, 0.0, &grid).unwrap();
        assert!(scan.records.iter().all(|r| r.n_real == 6));
    }

    #[test]
    fn scan_is_mirror_symmetric() {
        let grid = linear_grid(0.1, 2.9, 0.1).unwrap();
        let mirrored: Vec<f64> = grid.iter().rev().map(|z| -z).collect();
        let a = scan_z(1.035, 0.2, &grid).unwrap();
        let b = scan_z(1.035, 0.2, &mirrored).unwrap();
        for (ra, rb) in a.records.iter().zip(b.records.iter().rev()) {
            assert_eq!(ra.n_real, rb.n_real);
            // z = 1 is a double degeneracy where only sqrt(eps) accuracy is attainable
            if (ra.z - 1.0).abs() < 1e-9 {
                continue;
            }
            for (x, y) in ra.eigenvalues.iter().zip(&rb.eigenvalues) {
                assert!((x - y).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn scan_csv_layout() {
        let scan = scan_z(0.0, 0.0, &[0.0, 0.5]).unwrap();
        let csv = scan.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("z,ReE_1,"));
        assert!(lines[0].ends_with("ImE_8,n_real"));
        assert_eq!(lines[1].split(',').count(), 18);
        assert!(lines[1].ends_with(",8"));
    }

    #[test]
    fn chain_exceptional_point_at_unit_nu() {
        let ep = find_chain_exceptional_point(1, 0.5, 1.5).unwrap();
        assert!((ep - 1.0).abs() < 1e-7, "{ep}");
        for k in 2..=4 {
            let ep = find_chain_exceptional_point(k, 0.5, 1.5).unwrap();
            assert!((ep - 1.0).abs() < 1e-6, "K={k}: {ep}");
        }
    }

    #[test]
    fn island_edges_at_gamma_1035() {
        let upper = find_exceptional_point(1.035, 0.0, 1.001, 1.1).unwrap();
        assert!((upper - 1.022).abs() < 2e-3, "{upper}");
        let far = find_exceptional_point(1.035, 0.0, 2.0, 4.0).unwrap();
        assert!((far - 3.0).abs() < 0.3, "{far}");
    }

    #[test]
    fn invalid_bracket_is_reported() {
        assert!(matches!(
            find_exceptional_point(0.0, 0.0, 0.1, 0.5),
            Err(Error::InvalidBracket { count: 8, .. })
        ));
        assert!(find_exceptional_point(0.0, 0.0, 0.5, 0.1).is_err());
    }
}
