//! Dense real nonsymmetric eigenvalues.
//!
//! Pipeline: diagonal balancing, Householder reduction to upper Hessenberg
//! form, then the Francis implicit double-shift QR iteration. Complex
//! eigenvalues come out of 2x2 blocks and are therefore exact conjugates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::format_value;
use crate::matrix::SquareRealMatrix;

/// Mixed absolute/relative tolerance on `|Im E|` for calling a level real.
pub const REALITY_TOL: f64 = 1e-8;

/// `|Im e| < tol * max(1, |Re e|)`.
pub fn is_real(e: Complex64, tol: f64) -> bool {
    e.im.abs() < tol * e.re.abs().max(1.0)
}

/// Eigenvalues sorted by real part, then imaginary part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    reality_flags: Vec<bool>,
    n_real: usize,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<Complex64>) -> Self {
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let reality_flags: Vec<bool> = eigenvalues.iter().map(|&e| is_real(e, REALITY_TOL)).collect();
        let n_real = reality_flags.iter().filter(|&&f| f).count();
        Self { eigenvalues, reality_flags, n_real }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn reality_flags(&self) -> &[bool] {
        &self.reality_flags
    }

    pub fn n_real(&self) -> usize {
        self.n_real
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_fully_real(&self) -> bool {
        self.n_real == self.dim()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.re).collect()
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }

    pub fn product(&self) -> Complex64 {
        self.eigenvalues.iter().product()
    }

    /// `dim, Re E_1, Im E_1, Re E_2, Im E_2, ...`
    pub fn to_csv_row(&self) -> String {
        let mut cells = vec![self.dim().to_string()];
        for e in &self.eigenvalues {
            cells.push(format_value(e.re));
            cells.push(format_value(e.im));
        }
        cells.join(",")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealityClassification {
    pub n_real: usize,
    /// Index pairs (into the sorted spectrum) of adjacent levels that are
    /// real and closer than the tolerance: exceptional-point candidates.
    pub merged_pairs: Vec<(usize, usize)>,
}

pub fn classify_reality(s: &Spectrum, tol: f64) -> RealityClassification {
    let ev = s.eigenvalues();
    let real: Vec<bool> = ev.iter().map(|&e| is_real(e, tol)).collect();
    let n_real = real.iter().filter(|&&r| r).count();
    let merged_pairs = (1..ev.len())
        .filter(|&i| real[i - 1] && real[i])
        .filter(|&i| (ev[i] - ev[i - 1]).norm() < tol * ev[i].re.abs().max(1.0))
        .map(|i| (i - 1, i))
        .collect();
    RealityClassification { n_real, merged_pairs }
}

/// All eigenvalues of `m`.
pub fn eigenvalues(m: &SquareRealMatrix) -> Result<Spectrum> {
    let n = m.dim();
    let mut a: Vec<Vec<f64>> = m.rows();
    balance(&mut a);
    hessenberg(&mut a);
    let ev = hessenberg_qr(a, 30 * n)?;
    debug_assert_eq!(ev.len(), n);
    Ok(Spectrum::new(ev))
}

/// Number of eigenvalues flagged real at [`REALITY_TOL`].
pub fn count_real(m: &SquareRealMatrix) -> Result<usize> {
    Ok(eigenvalues(m)?.n_real())
}

const RADIX: f64 = 2.0;

/// Similarity scaling by powers of two so row and column norms match.
fn balance(a: &mut [Vec<f64>]) {
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i][j] *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(h: &mut [Vec<f64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let f: f64 = (m..=high).rev().map(|i| ort[i] * h[i][j]).sum::<f64>() / hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut().take(high + 1) {
            let f: f64 = (m..=high).rev().map(|j| ort[j] * row[j]).sum::<f64>() / hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m][m - 1] = scale * g;
        for row in h.iter_mut().skip(m + 1) {
            row[m - 1] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
///
/// `max_iterations` bounds the total number of QR sweeps.
fn hessenberg_qr(h: Vec<Vec<f64>>, max_iterations: usize) -> Result<Vec<Complex64>> {
    let n = h.len();
    // 1-based working copy keeps the classic index arithmetic readable
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = h[i][j];
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }

    let mut nn = n as isize;
    let mut shift = 0.0;
    let mut total = 0usize;
    while nn >= 1 {
        let nu = nn as usize;
        let mut its = 0usize;
        loop {
            // look for a negligible subdiagonal element
            let mut l = nu;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= f64::EPSILON * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = a[nu][nu];
            if l == nu {
                wr[nu] = x + shift;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let y = a[nu - 1][nu - 1];
            let w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let zz = q.abs().sqrt();
                let x = x + shift;
                if q >= 0.0 {
                    let zz = p + zz.copysign(p);
                    wr[nu - 1] = x + zz;
                    wr[nu] = x + zz;
                    if zz != 0.0 {
                        wr[nu] = x - w / zz;
                    }
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -zz;
                    wi[nu] = zz;
                }
                nn -= 2;
                break;
            }

            if total >= max_iterations {
                return Err(Error::QrNoConvergence(max_iterations));
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its > 0 && its.is_multiple_of(10) {
                // exceptional shift
                shift += x;
                for i in 1..=nu {
                    a[i][i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;

            // find two consecutive small subdiagonal elements
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let zz = a[m][m];
                let r0 = x - zz;
                let s0 = y - zz;
                p = (r0 * s0 - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - zz - r0 - s0;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + zz.abs() + a[m + 1][m + 1].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }

            // double QR step on rows l..nn and columns m..nn
            let mut k = m;
            while k < nu {
                let mut xk = 0.0;
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nu - 1 { a[k + 2][k - 1] } else { 0.0 };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * xk;
                    }
                    p += s;
                    let xr = p / s;
                    let yr = q / s;
                    let zr = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pj = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            pj += r * a[k + 2][j];
                            a[k + 2][j] -= pj * zr;
                        }
                        a[k + 1][j] -= pj * yr;
                        a[k][j] -= pj * xr;
                    }
                    let mmin = nu.min(k + 3);
                    for i in l..=mmin {
                        let mut pi = xr * a[i][k] + yr * a[i][k + 1];
                        if k != nu - 1 {
                            pi += zr * a[i][k + 2];
                            a[i][k + 2] -= pi * r;
                        }
                        a[i][k + 1] -= pi * q;
                        a[i][k] -= pi;
                    }
                }
                k += 1;
            }
            if l >= nu - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// Orthonormal basis of the numerical null space of `a - energy * I`: the
/// right singular vectors whose singular values fall below `tol * ||a||`,
/// at least `min_count` of them. Also returns the largest accepted singular
/// value relative to `||a||`.
pub(crate) fn null_vectors(
    a: &DMatrix<f64>,
    energy: f64,
    min_count: usize,
) -> (Vec<DVector<f64>>, Vec<f64>) {
    let n = a.nrows();
    let shifted = a - DMatrix::<f64>::identity(n, n) * energy;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let take = min_count.max(1);
    let vectors = order[..take].iter().map(|&i| v_t.row(i).transpose()).collect();
    let sigmas = order[..take].iter().map(|&i| svd.singular_values[i] / scale).collect();
    (vectors, sigmas)
}

/// Unit right eigenvector for a real eigenvalue (`M v = E v`).
pub fn right_eigenvector(m: &SquareRealMatrix, energy: f64) -> DVector<f64> {
    null_vectors(m.as_dmatrix(), energy, 1).0.remove(0)
}

/// Unit left eigenvector for a real eigenvalue (`l^T M = E l^T`).
pub fn left_eigenvector(m: &SquareRealMatrix, energy: f64) -> DVector<f64> {
    null_vectors(&m.as_dmatrix().transpose(), energy, 1).0.remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_coupled_chain, build_free_chain, build_loop_graph};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_chain_closed_form() {
        let s = eigenvalues(&build_coupled_chain(1, 0.6).unwrap()).unwrap();
        assert!((s.eigenvalues()[0] - c(1.2, 0.0)).norm() < 1e-14);
        assert!((s.eigenvalues()[1] - c(2.8, 0.0)).norm() < 1e-14);
        assert_eq!(s.n_real(), 2);

        let s = eigenvalues(&build_coupled_chain(1, 1.0).unwrap()).unwrap();
        assert!(s.eigenvalues().iter().all(|&e| (e - c(2.0, 0.0)).norm() < 1e-12));

        let s = eigenvalues(&build_coupled_chain(1, 2.0).unwrap()).unwrap();
        let r3 = 3f64.sqrt();
        assert!((s.eigenvalues()[0] - c(2.0, -r3)).norm() < 1e-14);
        assert!((s.eigenvalues()[1] - c(2.0, r3)).norm() < 1e-14);
        assert_eq!(s.n_real(), 0);
    }

    #[test]
    fn free_chain_dirichlet_levels() {
        for k in 1..=10 {
            let s = eigenvalues(&build_free_chain(k).unwrap()).unwrap();
            let n = 2 * k;
            for (j, e) in s.eigenvalues().iter().enumerate() {
                let exact = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
                assert!((e.re - exact).abs() < 1e-12 && e.im == 0.0, "K={k} j={j}");
            }
        }
    }

    #[test]
    fn loop_reality_examples() {
        let s = eigenvalues(&build_loop_graph(3, 0.0, 0.0, 0.5).unwrap()).unwrap();
        assert_eq!(classify_reality(&s, REALITY_TOL).n_real, 8);
        let s = eigenvalues(&build_loop_graph(3, 0.0, 0.0, 1.03).unwrap()).unwrap();
        assert_eq!(classify_reality(&s, REALITY_TOL).n_real, 6);
        let s = eigenvalues(&build_loop_graph(3, 0.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(!classify_reality(&s, 1e-6).merged_pairs.is_empty());
    }

    #[test]
    fn trace_is_eighteen_for_k3() {
        for &(g, h, z) in &[(0.0, 0.0, 0.0), (1.035, 1.035, 1.01), (1.9, -0.3, 2.2)] {
            let s = eigenvalues(&build_loop_graph(3, g, h, z).unwrap()).unwrap();
            assert!((s.sum() - c(18.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_pairs_are_exact() {
        let s = eigenvalues(&build_loop_graph(3, 0.4, 1.7, 2.3).unwrap()).unwrap();
        let ev = s.eigenvalues();
        for e in ev.iter().filter(|e| e.im != 0.0) {
            assert!(ev.iter().any(|f| (f - e.conj()).norm() < 1e-12));
        }
    }

    #[test]
    fn classification_tolerance_is_mixed() {
        assert!(is_real(c(5.0, 4e-8), 1e-8));
        assert!(!is_real(c(0.5, 2e-8), 1e-8));
        let s = Spectrum::new(vec![c(2.0, 1e-3), c(1.0, 0.0), c(2.0, -1e-3)]);
        let cls = classify_reality(&s, 1e-8);
        assert_eq!(cls.n_real, 1);
        assert_eq!(classify_reality(&s, 1e-2).n_real, 3);
        assert_eq!(classify_reality(&s, 1e-2).merged_pairs, vec![(1, 2)]);
        assert_eq!(s.eigenvalues()[0], c(1.0, 0.0));
    }

    #[test]
    fn csv_row_interleaves() {
        let s = Spectrum::new(vec![c(2.0, -1.0), c(2.0, 1.0)]);
        assert_eq!(s.to_csv_row(), "2,2,-1,2,1");
    }

    #[test]
    fn handles_degenerate_shapes() {
        let s = eigenvalues(&SquareRealMatrix::from_row_slice(1, &[3.5]).unwrap()).unwrap();
        assert_eq!(s.eigenvalues(), &[c(3.5, 0.0)]);
        let z = eigenvalues(&SquareRealMatrix::zeros(5)).unwrap();
        assert!(z.eigenvalues().iter().all(|e| e.norm() == 0.0));
        // already triangular with widely spread scales
        let m = SquareRealMatrix::from_row_slice(3, &[1e6, 1.0, 0.0, 0.0, 1.0, 1e-3, 0.0, 0.0, 1e-6]).unwrap();
        let s = eigenvalues(&m).unwrap();
        assert!((s.eigenvalues()[0].re - 1e-6).abs() < 1e-15);
        assert!((s.eigenvalues()[2].re - 1e6).abs() < 1e-6);
    }

    #[test]
    fn companion_matrix_rotation() {
        // cyclic permutation: eigenvalues are the 5th roots of unity
        let mut m = SquareRealMatrix::zeros(5);
        for i in 0..5 {
            m[((i + 1) % 5, i)] = 1.0;
        }
        let s = eigenvalues(&m).unwrap();
        for k in 0..5 {
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 5.0);
            assert!(s.eigenvalues().iter().any(|e| (e - w).norm() < 1e-12));
        }
    }

    #[test]
    fn eigenvectors_satisfy_their_equations() {
        let m = build_loop_graph(3, 1.035, 1.035, 1.01).unwrap();
        let s = eigenvalues(&m).unwrap();
        let a = m.as_dmatrix();
        for e in s.eigenvalues() {
            let r = right_eigenvector(&m, e.re);
            let l = left_eigenvector(&m, e.re);
            assert!((a * &r - &r * e.re).norm() < 1e-9);
            assert!((a.transpose() * &l - &l * e.re).norm() < 1e-9);
        }
    }
}
