//! Real polynomials in ascending coefficient order and an Aberth–Ehrlich
//! simultaneous root finder.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::csv_row;

/// `coeffs[k]` multiplies `t^k`. Trailing exact zeros are trimmed so the last
/// coefficient is non-zero, except for the zero polynomial `[0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    /// Builds a polynomial from coefficients in descending order, the way
    /// secular equations are usually written.
    pub fn from_descending(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().rev().copied().collect())
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `t - root`.
    pub fn linear_factor(root: f64) -> Self {
        Self::new(vec![-root, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().expect("non-empty")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0.0]
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Self::new(self.coeffs.iter().map(|c| c / lead).collect())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::constant(0.0);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    pub fn pow(&self, exponent: u32) -> Self {
        (0..exponent).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// Substitutes `t = a s + b` and returns the polynomial in `s`.
    pub fn compose_affine(&self, a: f64, b: f64) -> Self {
        let inner = Self::new(vec![b, a]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::constant(0.0), |acc, &c| &(&acc * &inner) + &Self::constant(c))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn eval_complex(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    /// Max coefficient difference relative to the largest coefficient of either operand.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, k: usize| p.coeffs.get(k).copied().unwrap_or(0.0);
        let scale = self.max_abs_coeff().max(other.max_abs_coeff());
        if scale == 0.0 {
            return 0.0;
        }
        (0..n).map(|k| (get(self, k) - get(other, k)).abs()).fold(0.0, f64::max) / scale
    }

    /// Coefficients as one CSV row, ascending degree.
    pub fn to_csv_row(&self) -> String {
        csv_row(self.coeffs.iter().copied())
    }

    /// Expansion in descending powers, e.g. `E^2 - 4 E + 3`.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c < 0.0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0.0 { " - " } else { " + " });
            }
            let coeff = crate::format::format_value(mag);
            match k {
                0 => out.push_str(&coeff),
                _ => {
                    if mag != 1.0 {
                        out.push_str(&coeff);
                        out.push(' ');
                    }
                    out.push_str(var);
                    if k > 1 {
                        out.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("E"))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + rhs.coeffs.get(k).unwrap_or(&0.0))
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

const MAX_SWEEPS: usize = 500;

/// All complex roots of `p`, sorted by real part then imaginary part.
///
/// Aberth–Ehrlich iteration on the monic polynomial followed by Newton
/// polishing against the original coefficients. Multiple roots come back as
/// tight clusters; see [`root_clusters`].
pub fn polynomial_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    if p.degree() == 0 || p.coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::DegeneratePolynomial);
    }
    // exact zero roots
    let zeros = p.coeffs.iter().take_while(|&&c| c == 0.0).count();
    let reduced = Polynomial::new(p.coeffs[zeros..].to_vec()).monic();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if reduced.degree() > 0 {
        roots.extend(aberth(&reduced)?);
    }
    for r in roots.iter_mut().skip(zeros) {
        *r = polish(&reduced, *r);
    }
    pair_conjugates(&mut roots);
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

fn aberth(p: &Polynomial) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let a = p.coeffs();
    if n == 1 {
        return Ok(vec![Complex64::new(-a[0] / a[1], 0.0)]);
    }
    let dp = p.derivative();
    // abs-coefficient polynomial bounds the rounding error of Horner evaluation
    let abs_p = Polynomial::new(a.iter().map(|c| c.abs()).collect());

    // Fujiwara bound on root moduli, initial points on a circle about the centroid.
    let centre = -a[n - 1] / n as f64;
    let radius = (1..=n)
        .map(|k| {
            let c = (a[n - k] / a[n]).abs();
            if k == n {
                (c / 2.0).powf(1.0 / k as f64)
            } else {
                c.powf(1.0 / k as f64)
            }
        })
        .fold(0.0_f64, f64::max)
        * 2.0;
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64 + 0.4;
            Complex64::new(centre, 0.0) + Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; n];

    for _ in 0..MAX_SWEEPS {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let pv = p.eval_complex(zi);
            let bound = 4.0 * f64::EPSILON * abs_p.eval(zi.norm());
            if pv.norm() <= bound {
                done[i] = true;
                continue;
            }
            let ratio = pv / dp.eval_complex(zi);
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (zi - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // coincident iterates: nudge off the collision
                z[i] = zi + Complex64::new(0.0, 1e-8 * (1.0 + zi.norm()));
                all_done = false;
                continue;
            }
            z[i] = zi - step;
            if step.norm() <= 2.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    Err(Error::RootsNoConvergence(MAX_SWEEPS))
}

/// A few Newton steps, kept only while they reduce `|p|`.
fn polish(p: &Polynomial, root: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut best = root;
    let mut best_val = p.eval_complex(root).norm();
    for _ in 0..3 {
        if best_val == 0.0 {
            break;
        }
        let d = dp.eval_complex(best);
        if d.norm() == 0.0 {
            break;
        }
        let cand = best - p.eval_complex(best) / d;
        let val = p.eval_complex(cand).norm();
        if val < best_val && cand.re.is_finite() && cand.im.is_finite() {
            best = cand;
            best_val = val;
        } else {
            break;
        }
    }
    best
}

/// Restores the conjugate symmetry of a real polynomial's roots. A root whose
/// mirror image has no partner closer than the root's own distance to the
/// real axis is taken to be real; matched pairs are made exact conjugates.
fn pair_conjugates(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut settled = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| roots[i].im.abs().total_cmp(&roots[j].im.abs()));
    for &i in &order {
        if settled[i] {
            continue;
        }
        settled[i] = true;
        let zi = roots[i];
        if zi.im == 0.0 {
            continue;
        }
        let mirror = zi.conj();
        let partner = (0..n)
            .filter(|&j| !settled[j])
            .map(|j| (j, (roots[j] - mirror).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match partner {
            Some((j, d)) if d < zi.im.abs() => {
                let upper = if zi.im > 0.0 { (zi + roots[j].conj()) * 0.5 } else { (zi.conj() + roots[j]) * 0.5 };
                roots[i] = if zi.im > 0.0 { upper } else { upper.conj() };
                roots[j] = roots[i].conj();
                settled[j] = true;
            }
            _ => roots[i] = Complex64::new(zi.re, 0.0),
        }
    }
}

/// A group of numerically coincident roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster {
    /// Mean of the member roots; far more accurate than any single member
    /// when the cluster is a genuine multiple root.
    pub center: Complex64,
    pub multiplicity: usize,
}

impl RootCluster {
    /// Sharpens the center of a multiple root by Newton iteration on the
    /// `(m - 1)`-th derivative of `p`, for which it is a simple root. Keeps
    /// the original center if the iteration wanders off.
    pub fn refined(&self, p: &Polynomial) -> RootCluster {
        if self.multiplicity < 2 {
            return self.clone();
        }
        let mut q = p.clone();
        for _ in 1..self.multiplicity {
            q = q.derivative();
        }
        let dq = q.derivative();
        let mut z = self.center;
        for _ in 0..50 {
            let d = dq.eval_complex(z);
            if d.norm() == 0.0 {
                break;
            }
            let step = q.eval_complex(z) / d;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            z -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
                break;
            }
        }
        let spread = (z - self.center).norm();
        if spread.is_finite() && spread < 1e-2 * self.center.norm().max(1.0) {
            if self.center.im == 0.0 {
                z.im = 0.0;
            }
            RootCluster { center: z, multiplicity: self.multiplicity }
        } else {
            self.clone()
        }
    }
}

/// Roots of `p` with each cluster of radius `radius` collapsed onto its
/// refined center, repeated by multiplicity. Exact multiple roots come back
/// to near machine precision instead of the `eps^(1/m)` spread of the raw
/// iteration.
pub fn clustered_roots(p: &Polynomial, radius: f64) -> Result<Vec<Complex64>> {
    let roots = polynomial_roots(p)?;
    let mut out: Vec<Complex64> = root_clusters(&roots, radius)
        .iter()
        .flat_map(|c| {
            let c = c.refined(p);
            std::iter::repeat_n(c.center, c.multiplicity)
        })
        .collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Single-linkage grouping of roots closer than `radius`, sorted by center.
pub fn root_clusters(roots: &[Complex64], radius: f64) -> Vec<RootCluster> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Complex64>> = Default::default();
    for i in 0..n {
        let r = find(&mut label, i);
        groups.entry(r).or_default().push(roots[i]);
    }
    let mut out: Vec<RootCluster> = groups
        .into_values()
        .map(|members| RootCluster {
            center: members.iter().sum::<Complex64>() / members.len() as f64,
            multiplicity: members.len(),
        })
        .collect();
    out.sort_by(|a, b| a.center.re.total_cmp(&b.center.re).then(a.center.im.total_cmp(&b.center.im)));
    out
}
