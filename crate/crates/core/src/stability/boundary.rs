//! Analytic boundary of the strong-coupling stability island at `delta = 0`.
//!
//! The plus quartet, written in `x = 2E - 5` with `mu_hat = 16 (gamma^2 - 1)`
//! and `lambda_hat = 4 (z^2 - 1)`, loses its two leftmost real roots where
//! `S = S' = 0`. Eliminating `lambda_hat` and solving for `mu_hat` gives a
//! parametrization by the double root `y` in `[-c, -1]`, `c` the golden ratio.
//! The minus quartet adds the `gamma`-independent cap `z^2 - 1 < lambda_max`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::loop_hamiltonian;
use crate::eigen::{count_real, is_real, REALITY_TOL};
use crate::error::{Error, Result};
use crate::format::format_value;
use crate::polynomial::{polynomial_roots, Polynomial};

/// `(1 + sqrt 5) / 2`
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Relative offset of the two probe points used by [`verify_boundary`].
pub const DEFAULT_MARGIN: f64 = 1e-4;

/// Degenerate point of the minus quartet's two lower levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinusQuartetEdge {
    /// Energy at which the two levels meet.
    pub y: f64,
    /// Largest `z^2 - 1` for which the minus quartet stays real.
    pub lambda_max: f64,
}

/// Solves `2y^3 - 16y^2 + 42y - 35 = 0` for its single real root and returns
/// `lambda_max = -Q'(y)` with `Q(E) = E^3 - 7E^2 + 15E - 10`.
pub fn minus_quartet_lambda_max() -> MinusQuartetEdge {
    static EDGE: OnceLock<MinusQuartetEdge> = OnceLock::new();
    *EDGE.get_or_init(|| {
        let cubic = Polynomial::from_descending(&[2.0, -16.0, 42.0, -35.0]);
        let roots = polynomial_roots(&cubic).expect("cubic roots converge");
        let real: Vec<f64> = roots.iter().filter(|r| is_real(**r, REALITY_TOL)).map(|r| r.re).collect();
        assert_eq!(real.len(), 1, "edge cubic must have exactly one real root");
        let y = real[0];
        let q = Polynomial::from_descending(&[1.0, -7.0, 15.0, -10.0]);
        let dq = q.derivative();
        // the meeting point is a maximum of Q + lambda (E - 3)
        assert!(dq.derivative().eval(y) < 0.0);
        MinusQuartetEdge { y, lambda_max: -dq.eval(y) }
    })
}

/// `z` beyond which the minus quartet complexifies: `sqrt(1 + lambda_max)`.
pub fn minus_quartet_z_max() -> f64 {
    (1.0 + minus_quartet_lambda_max().lambda_max).sqrt()
}

fn radicand(y: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !y.is_finite() || !(-GOLDEN_RATIO - SLACK..=-1.0 + SLACK).contains(&y) {
        return Err(Error::BoundaryRange(y));
    }
    Ok((-y * y + 1.0 - y).max(0.0))
}

/// `(mu_hat_minus, mu_hat_plus) = -y^2 + 3 -/+ 2 sqrt(-y^2 + 1 - y)`.
pub fn boundary_mu_hat(y: f64) -> Result<(f64, f64)> {
    let s = radicand(y)?.sqrt();
    let base = -y * y + 3.0;
    Ok((base - 2.0 * s, base + 2.0 * s))
}

/// `(lambda_hat_minus, lambda_hat_plus)`, each the boundary value belonging
/// to the `mu_hat` of the same branch:
/// `(y + 1)(y^2 + y - 2 -/+ 2 sqrt(-y^2 + 1 - y)) / (-y)`.
pub fn boundary_lambda_hat_max(y: f64) -> Result<(f64, f64)> {
    let s = radicand(y)?.sqrt();
    let base = y * y + y - 2.0;
    let f = |t: f64| (y + 1.0) * t / (-y);
    Ok((f(base - 2.0 * s), f(base + 2.0 * s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryBranch {
    Plus,
    Minus,
}

impl BoundaryBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryBranch::Plus => "plus",
            BoundaryBranch::Minus => "minus",
        }
    }
}

/// One point of the parametric island boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundarySample {
    pub y: f64,
    pub branch: BoundaryBranch,
    pub mu_hat: f64,
    pub lambda_hat_max: f64,
    /// `g = h = sqrt(1 + mu_hat / 16)`
    pub g: f64,
    /// `sqrt(1 + lambda_hat_max / 4)`
    pub z_max: f64,
}

pub fn boundary_sample(y: f64, branch: BoundaryBranch) -> Result<BoundarySample> {
    let (mu_m, mu_p) = boundary_mu_hat(y)?;
    let (la_m, la_p) = boundary_lambda_hat_max(y)?;
    let (mu_hat, lambda_hat_max) = match branch {
        BoundaryBranch::Plus => (mu_p, la_p),
        BoundaryBranch::Minus => (mu_m, la_m),
    };
    Ok(BoundarySample {
        y,
        branch,
        mu_hat,
        lambda_hat_max,
        g: (1.0 + mu_hat / 16.0).max(0.0).sqrt(),
        z_max: (1.0 + lambda_hat_max / 4.0).max(0.0).sqrt(),
    })
}

/// `n_samples` values of `y` evenly spaced on `[-c, -1]`, endpoints included;
/// each contributes a plus and a minus sample, in that order.
pub fn boundary_curve(n_samples: usize) -> Result<Vec<BoundarySample>> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter(format!("boundary needs at least 2 samples, got {n_samples}")));
    }
    let mut out = Vec::with_capacity(2 * n_samples);
    for y in super::linspace(-GOLDEN_RATIO, -1.0, n_samples) {
        out.push(boundary_sample(y, BoundaryBranch::Plus)?);
        out.push(boundary_sample(y, BoundaryBranch::Minus)?);
    }
    Ok(out)
}

/// Columns `y, branch, mu_hat, lambda_hat_max, g, z_max`.
pub fn boundary_to_csv(samples: &[BoundarySample]) -> String {
    let mut out = String::from("y,branch,mu_hat,lambda_hat_max,g,z_max\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_value(s.y),
            s.branch.as_str(),
            format_value(s.mu_hat),
            format_value(s.lambda_hat_max),
            format_value(s.g),
            format_value(s.z_max)
        ));
    }
    out
}

/// Boundary sample whose `mu_hat` equals the given value.
///
/// `mu_hat` in `[2 - c, 4]` lies on the plus branch, where `mu_hat_plus(y)`
/// increases monotonically. `mu_hat` in `(0, 2 - c)` lies on the decreasing
/// stretch of the minus branch next to `y = -c`.
pub fn boundary_sample_for_mu_hat(mu_hat: f64) -> Result<BoundarySample> {
    let low = 2.0 - GOLDEN_RATIO;
    let (branch, lo, hi) = if (low..=4.0).contains(&mu_hat) {
        (BoundaryBranch::Plus, -GOLDEN_RATIO, -1.0)
    } else if mu_hat > 0.0 && mu_hat < low {
        (BoundaryBranch::Minus, -GOLDEN_RATIO, -1.5)
    } else {
        return Err(Error::NoBoundaryPoint(mu_hat));
    };
    let value = |y: f64| -> f64 {
        let (m, p) = boundary_mu_hat(y).expect("y stays in range");
        match branch {
            BoundaryBranch::Plus => p - mu_hat,
            BoundaryBranch::Minus => m - mu_hat,
        }
    };
    let (mut a, mut b) = (lo, hi);
    let fa_sign = value(a) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if (value(mid) > 0.0) == fa_sign {
            a = mid;
        } else {
            b = mid;
        }
    }
    boundary_sample(0.5 * (a + b), branch)
}

/// Island edge along `z` for this sample: the tighter of the plus-quartet
/// boundary and the minus-quartet cap.
pub fn effective_z_max(sample: &BoundarySample) -> f64 {
    sample.z_max.min(minus_quartet_z_max())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryVerdict {
    /// Fully real just inside the edge, not fully real just outside.
    Confirmed,
    Refuted,
    /// The window `(1, z_edge)` is narrower than the probe margin.
    DegenerateWindow,
}

impl BoundaryVerdict {
    pub fn passed(self) -> bool {
        self == BoundaryVerdict::Confirmed
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryVerdict::Confirmed => "confirmed",
            BoundaryVerdict::Refuted => "refuted",
            BoundaryVerdict::DegenerateWindow => "degenerate-window",
        }
    }
}

/// Probes the spectrum of `H^(3)(g, g; z)` at `z_edge (1 -/+ margin)`.
pub fn verify_boundary(sample: &BoundarySample, margin: f64) -> Result<BoundaryVerdict> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::InvalidParameter(format!("margin {margin} must lie in (0, 1)")));
    }
    let edge = effective_z_max(sample);
    let inside = edge * (1.0 - margin);
    if inside <= 1.0 {
        return Ok(BoundaryVerdict::DegenerateWindow);
    }
    let fully_real = |z: f64| -> Result<bool> {
        let h = loop_hamiltonian(sample.g, 0.0, z)?;
        Ok(count_real(&h)? == h.dim())
    };
    let verdict = if fully_real(inside)? && !fully_real(edge * (1.0 + margin))? {
        BoundaryVerdict::Confirmed
    } else {
        BoundaryVerdict::Refuted
    };
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::{minus_cubic, quartic_minus};
    use crate::stability::find_exceptional_point;

    #[test]
    fn minus_quartet_constants() {
        let edge = minus_quartet_lambda_max();
        assert!((edge.y - 1.702843492).abs() < 1e-9, "{}", edge.y);
        assert!((edge.lambda_max - 0.14078102).abs() < 1e-7, "{}", edge.lambda_max);
        // y is a double root of the minus cubic at z^2 = 1 + lambda_max
        let z = (1.0 + edge.lambda_max).sqrt();
        let cubic = minus_cubic(z);
        assert!(cubic.eval(edge.y).abs() < 1e-12);
        assert!(cubic.derivative().eval(edge.y).abs() < 1e-12);
        assert!((minus_quartet_z_max() - z).abs() < 1e-15);
    }

    #[test]
    fn top_minus_level_stays_real_and_decreases_to_three() {
        let mut prev = f64::INFINITY;
        for &z in &[1.0, 1.5, 3.0, 10.0, 100.0, 1000.0] {
            let roots = polynomial_roots(&quartic_minus(z, 0.0)).unwrap();
            let top = roots.last().unwrap();
            assert!(top.im.abs() < 1e-9);
            assert!(top.re < prev && top.re > 3.0);
            prev = top.re;
        }
        let at_one = polynomial_roots(&minus_cubic(1.0)).unwrap();
        assert!((at_one[2].re - 3.618).abs() < 1e-3);
        assert!((prev - 3.0).abs() < 1e-5);
    }

    #[test]
    fn golden_endpoint() {
        let c = GOLDEN_RATIO;
        assert!((c * c - c - 1.0).abs() < 1e-15);
        let (m, p) = boundary_mu_hat(-c).unwrap();
        assert!((m - (2.0 - c)).abs() < 1e-9 && (p - (2.0 - c)).abs() < 1e-9);
        assert!((m - 0.381966).abs() < 1e-6);
        let (lm, lp) = boundary_lambda_hat_max(-c).unwrap();
        assert!((lm - (c - 1.0) / c).abs() < 1e-9 && (lp - (c - 1.0) / c).abs() < 1e-9);
    }

    #[test]
    fn unit_endpoint() {
        assert_eq!(boundary_mu_hat(-1.0).unwrap(), (0.0, 4.0));
        let (lm, lp) = boundary_lambda_hat_max(-1.0).unwrap();
        assert_eq!(lm, 0.0);
        assert_eq!(lp, 0.0);
    }

    #[test]
    fn range_guard() {
        for y in [-1.7, -0.9, 0.0, f64::NAN] {
            assert!(matches!(boundary_mu_hat(y), Err(Error::BoundaryRange(_))));
            assert!(boundary_lambda_hat_max(y).is_err());
        }
    }

    #[test]
    fn mid_range_positive() {
        let (lm, lp) = boundary_lambda_hat_max(-1.3).unwrap();
        assert!(lm > 0.0 || lp > 0.0);
    }

    #[test]
    fn sampled_bounds() {
        let curve = boundary_curve(2001).unwrap();
        let min_mu_minus = curve
            .iter()
            .filter(|s| s.branch == BoundaryBranch::Minus)
            .map(|s| s.mu_hat)
            .fold(f64::INFINITY, f64::min);
        assert!(min_mu_minus > -0.4 && min_mu_minus < 0.0, "{min_mu_minus}");
        assert!(curve.iter().all(|s| s.g > 0.987));
        assert!(curve.iter().all(|s| s.lambda_hat_max >= 0.0 && s.z_max >= 1.0));
    }

    #[test]
    fn curve_endpoints_and_order() {
        let curve = boundary_curve(5).unwrap();
        assert_eq!(curve.len(), 10);
        assert_eq!(curve[0].y, -GOLDEN_RATIO);
        assert_eq!(curve[9].y, -1.0);
        assert_eq!(curve[0].branch, BoundaryBranch::Plus);
        assert_eq!(curve[1].branch, BoundaryBranch::Minus);
        assert_eq!(curve[8].mu_hat, 4.0);
        assert_eq!(curve[9].z_max, 1.0);
        assert!(boundary_curve(1).is_err());
    }

    #[test]
    fn gamma_1035_edge() {
        let mu_hat = 16.0 * (1.035f64.powi(2) - 1.0);
        let s = boundary_sample_for_mu_hat(mu_hat).unwrap();
        assert_eq!(s.branch, BoundaryBranch::Plus);
        assert!((s.g - 1.035).abs() < 1e-12);
        assert!((s.z_max - 1.022).abs() < 2e-3, "{}", s.z_max);
        // minus-quartet cap is not the binding one here
        assert!(s.lambda_hat_max < 4.0 * minus_quartet_lambda_max().lambda_max);
        let numeric = find_exceptional_point(1.035, 0.0, 1.001, 1.1).unwrap();
        assert!((numeric - s.z_max).abs() < 1e-6, "{numeric} vs {}", s.z_max);
        assert_eq!(verify_boundary(&s, DEFAULT_MARGIN).unwrap(), BoundaryVerdict::Confirmed);
    }

    #[test]
    fn doubled_edge_is_refuted() {
        let s = boundary_sample_for_mu_hat(16.0 * (1.035f64.powi(2) - 1.0)).unwrap();
        let outside = BoundarySample { z_max: 2.0 * s.z_max, lambda_hat_max: 4.0 * (4.0 * s.z_max * s.z_max - 1.0), ..s };
        assert_eq!(verify_boundary(&outside, DEFAULT_MARGIN).unwrap(), BoundaryVerdict::Refuted);
    }

    #[test]
    fn pinched_end_is_degenerate() {
        let s = boundary_sample(-1.0, BoundaryBranch::Plus).unwrap();
        assert_eq!(s.z_max, 1.0);
        assert_eq!(verify_boundary(&s, DEFAULT_MARGIN).unwrap(), BoundaryVerdict::DegenerateWindow);
        assert!(verify_boundary(&s, 0.0).is_err());
    }

    #[test]
    fn minus_branch_with_positive_mu_hat_bounds_the_island() {
        let s = boundary_sample_for_mu_hat(0.1).unwrap();
        assert_eq!(s.branch, BoundaryBranch::Minus);
        assert!((s.mu_hat - 0.1).abs() < 1e-12);
        assert_eq!(verify_boundary(&s, DEFAULT_MARGIN).unwrap(), BoundaryVerdict::Confirmed);
        assert!(boundary_sample_for_mu_hat(-0.1).is_err());
        assert!(boundary_sample_for_mu_hat(4.5).is_err());
    }

    #[test]
    fn minus_branch_below_unit_gamma_is_not_an_island_edge() {
        let s = boundary_sample(-1.3, BoundaryBranch::Minus).unwrap();
        assert!(s.mu_hat < 0.0);
        assert_eq!(verify_boundary(&s, DEFAULT_MARGIN).unwrap(), BoundaryVerdict::Refuted);
    }
}
