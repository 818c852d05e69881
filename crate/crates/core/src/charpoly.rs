//! Characteristic polynomials and the closed-form secular factors of the
//! `K = 3` loop Hamiltonian.
//!
//! For `H = H^(3)(gamma + delta, gamma - delta; z)` the degree-8 secular
//! polynomial splits into two quartics, one depending only on `(z, gamma)`
//! and one only on `(z, delta)`:
//!
//! ```text
//! E^4 - 9 E^3 + P E^2 + Q E + R
//! ```

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matrix::SquareRealMatrix;
use crate::polynomial::Polynomial;

/// Largest matrix accepted by [`characteristic_polynomial`]; the trace
/// recursion loses accuracy quickly beyond this.
pub const CHARPOLY_MAX_DIM: usize = 64;

/// Monic `det(E I - M)` by the Faddeev–LeVerrier trace recursion.
///
/// The recursion cancels heavily, so it runs in double-double arithmetic and
/// only the final coefficients are rounded to `f64`. Roots of clustered
/// spectra are sensitive to the last bits of the coefficients.
pub fn characteristic_polynomial(m: &SquareRealMatrix) -> Result<Polynomial> {
    let n = m.dim();
    if n > CHARPOLY_MAX_DIM {
        return Err(Error::DimensionGuard { dim: n, max: CHARPOLY_MAX_DIM });
    }
    let a = m.as_dmatrix();
    let mut coeffs = vec![DoubleDouble::ZERO; n + 1];
    coeffs[n] = DoubleDouble::from(1.0);
    // a * aux, where aux starts at zero
    let mut product = vec![DoubleDouble::ZERO; n * n];
    for k in 1..=n {
        let shift = coeffs[n - k + 1];
        let aux: Vec<DoubleDouble> = (0..n * n)
            .map(|idx| if idx / n == idx % n { product[idx].add(shift) } else { product[idx] })
            .collect();
        for i in 0..n {
            for j in 0..n {
                let mut acc = DoubleDouble::ZERO;
                for l in 0..n {
                    acc = acc.add(aux[l * n + j].mul_f64(a[(i, l)]));
                }
                product[i * n + j] = acc;
            }
        }
        let trace = (0..n).fold(DoubleDouble::ZERO, |t, i| t.add(product[i * n + i]));
        coeffs[n - k] = trace.div_f64(-(k as f64));
    }
    Ok(Polynomial::new(coeffs.iter().map(|c| c.hi).collect()))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn renormalize(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, other: Self) -> Self {
        let s = Self::two_sum(self.hi, other.hi);
        let t = Self::two_sum(self.lo, other.lo);
        let r = Self::renormalize(s.hi, s.lo + t.hi);
        Self::renormalize(r.hi, r.lo + t.lo)
    }

    fn mul_f64(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        Self::renormalize(p, e + self.lo * b)
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self.add(Self::from(q1).mul_f64(-b));
        let q2 = r.hi / b;
        let r = r.add(Self::from(q2).mul_f64(-b));
        Self::renormalize(q1, q2).add(Self::from(r.hi / b))
    }
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

/// Plus-quartet secular factor; independent of `delta`.
pub fn quartic_plus(z: f64, gamma: f64) -> Polynomial {
    let (z2, g2) = (z * z, gamma * gamma);
    let p = z2 + 24.0 + 4.0 * g2;
    let q = -5.0 * z2 - 19.0 - 16.0 * g2;
    let r = 2.0 * z2 + 4.0 * g2 * z2 + 12.0 * g2 + 2.0;
    Polynomial::from_descending(&[1.0, -9.0, p, q, r])
}

/// Minus-quartet secular factor; independent of `gamma`.
pub fn quartic_minus(z: f64, delta: f64) -> Polynomial {
    let (z2, d2) = (z * z, delta * delta);
    let p = 28.0 + z2 + 4.0 * d2;
    let q = -35.0 - 5.0 * z2 - 16.0 * d2;
    let r = 14.0 + 6.0 * z2 + 12.0 * d2 + 4.0 * d2 * z2;
    Polynomial::from_descending(&[1.0, -9.0, p, q, r])
}

/// `E^3 - 7 E^2 + (14 + z^2) E - 7 - 3 z^2`: the minus quartet at `delta = 0`
/// with its constant root `E = 2` divided out.
pub fn minus_cubic(z: f64) -> Polynomial {
    let z2 = z * z;
    Polynomial::from_descending(&[1.0, -7.0, 14.0 + z2, -7.0 - 3.0 * z2])
}

/// Secular polynomial at `g = h = 1`: `(E - 2)^2 [minus_cubic(z)]^2`, degree 8.
pub fn degenerate_secular(z: f64) -> Polynomial {
    let linear = Polynomial::linear_factor(2.0).pow(2);
    &linear * &minus_cubic(z).pow(2)
}

/// Plus quartet in the reduced variable `x = 2E - 5`:
/// `S(x) = (x^2 + mu_hat - 5)(x + 1)^2 + lambda_hat (x^2 + mu_hat - 1)`.
pub fn reduced_secular(lambda_hat: f64, mu_hat: f64) -> Polynomial {
    let shifted = |c: f64| Polynomial::new(vec![mu_hat + c, 0.0, 1.0]);
    let xp1_sq = Polynomial::new(vec![1.0, 2.0, 1.0]);
    &(&shifted(-5.0) * &xp1_sq) + &shifted(-1.0).scale(lambda_hat)
}

/// Constant `s` with `reduced_secular(x = 2E - 5) = s * quartic_plus(E)`.
///
/// Determined once from the leading coefficients and checked coefficient-wise
/// at several parameter points.
pub fn reduced_secular_scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        let probe = |z: f64, gamma: f64| {
            let rp = ReducedParameters::from_couplings(z, gamma);
            let in_energy = reduced_secular(rp.lambda_hat, rp.mu_hat).compose_affine(2.0, -5.0);
            (in_energy, quartic_plus(z, gamma))
        };
        let (s, p) = probe(1.3, 0.7);
        let scale = s.leading() / p.leading();
        for &(z, gamma) in &[(1.3, 0.7), (0.0, 0.0), (2.5, 1.035), (-0.4, 1.9)] {
            let (s, p) = probe(z, gamma);
            let err = s.relative_distance(&p.scale(scale));
            assert!(err < 1e-12, "reduced secular form is not a constant multiple (err {err})");
        }
        scale
    })
}

/// Reduced couplings of the plus quartet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedParameters {
    /// `z^2 - 1`
    pub lambda: f64,
    /// `gamma^2 - 1`
    pub mu: f64,
    /// `4 lambda`
    pub lambda_hat: f64,
    /// `16 mu`
    pub mu_hat: f64,
}

impl ReducedParameters {
    pub fn from_couplings(z: f64, gamma: f64) -> Self {
        let lambda = z * z - 1.0;
        let mu = gamma * gamma - 1.0;
        Self { lambda, mu, lambda_hat: 4.0 * lambda, mu_hat: 16.0 * mu }
    }

    /// Non-negative `z` for this `lambda_hat`, if `lambda_hat >= -4`.
    pub fn z(&self) -> Option<f64> {
        let z2 = 1.0 + self.lambda_hat / 4.0;
        (z2 >= 0.0).then(|| z2.sqrt())
    }

    /// Non-negative `gamma` for this `mu_hat`, if `mu_hat >= -16`.
    pub fn gamma(&self) -> Option<f64> {
        let g2 = 1.0 + self.mu_hat / 16.0;
        (g2 >= 0.0).then(|| g2.sqrt())
    }
}

pub fn energy_to_reduced(e: f64) -> f64 {
    2.0 * e - 5.0
}

pub fn reduced_to_energy(x: f64) -> f64 {
    (x + 5.0) / 2.0
}
