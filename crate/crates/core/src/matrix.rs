use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::format::csv_row;

/// Dense square real matrix with finite entries.
///
/// Hamiltonians and metrics share this type. Energies are in grid units with
/// the lattice spacing set to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareRealMatrix(DMatrix<f64>);

/// Serialized as a list of rows.
impl Serialize for SquareRealMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl SquareRealMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::NotSquare {
                rows: dim,
                cols: entries.len().checked_div(dim).unwrap_or(0),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::NotSquare { rows: dim, cols: bad.len() });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(dim, &flat)
    }

    /// Wraps an nalgebra matrix after checking shape and finiteness.
    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if !m[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Largest entry of `|A - A^T|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.0 - self.0.transpose()).iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.0.row_iter().map(|r| r.sum()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.0.diagonal().iter().copied().collect()
    }

    /// Row-major rows.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// Full dense CSV, row-major, with a `col_1..col_N` header row.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = (1..=n).map(|j| format!("col_{j}")).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in self.0.row_iter() {
            out.push_str(&csv_row(row.iter().copied()));
            out.push('\n');
        }
        out
    }
}

impl Index<(usize, usize)> for SquareRealMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for SquareRealMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut f64 {
        &mut self.0[idx]
    }
}

impl fmt::Display for SquareRealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.0.row_iter() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:8.4}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}
