//! Dense row-major `f64` matrix used throughout the crate.
//!
//! Rows are observations (samples, images, trials), columns are features
//! (units, voxels, coordinates).  The type is deliberately small: heavy
//! linear algebra converts to [`nalgebra::DMatrix`] internally, while the
//! public API stays a plain buffer with shape checks.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Wrap a row-major buffer.  `data.len()` must equal `rows * cols` and
    /// both dimensions must be nonzero.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!(
                "matrix dimensions must be nonzero, got {rows}x{cols}"
            )));
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::InvalidShape(format!("{rows}x{cols} overflows usize")))?;
        if data.len() != expected {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} matrix needs {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// All-zero matrix.  Panics on zero dimensions (internal misuse).
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "zero matrix dimension");
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Build from row slices, which must all have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidShape("no rows given".into()));
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::InvalidShape(format!(
                    "row {i} has {} values, expected {cols}",
                    r.len()
                )));
            }
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// Copy of column `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// New matrix holding the listed rows, in the listed order.
    /// Indices out of range are a caller bug and panic.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        assert!(!indices.is_empty(), "empty row selection");
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: indices.len(), cols: self.cols, data }
    }

    /// Error with the position of the first non-finite entry, if any.
    pub fn validate_finite(&self) -> Result<()> {
        for (pos, v) in self.data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(format!(
                    "non-finite value {v} at row {}, column {}",
                    pos / self.cols,
                    pos % self.cols
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_dmatrix(m: &DMatrix<f64>) -> Matrix {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        Matrix { rows: m.nrows(), cols: m.ncols(), data }
    }
}
