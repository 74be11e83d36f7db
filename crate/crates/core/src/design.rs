use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major real matrix used for regression designs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Design {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged design rows".into()));
        }
        Ok(Self {
            nrows: rows.len(),
            ncols,
            data: rows.concat(),
        })
    }

    pub fn from_row_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::Dimension(format!(
                "{} values cannot fill a {nrows}x{ncols} design",
                data.len()
            )));
        }
        Ok(Self { nrows, ncols, data })
    }

    /// Column of ones.
    pub fn intercept(nrows: usize) -> Self {
        Self {
            nrows,
            ncols: 1,
            data: vec![1.0; nrows],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.ncols..(t + 1) * self.ncols]
    }

    #[inline]
    pub fn get(&self, t: usize, j: usize) -> f64 {
        self.data[t * self.ncols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nrows).map(|t| self.get(t, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// New design keeping only `cols`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.nrows * cols.len());
        for t in 0..self.nrows {
            let row = self.row(t);
            data.extend(cols.iter().map(|&j| row[j]));
        }
        Self {
            nrows: self.nrows,
            ncols: cols.len(),
            data,
        }
    }

    /// Rows `start..end`.
    pub fn slice_rows(&self, start: usize, end: usize) -> Self {
        Self {
            nrows: end - start,
            ncols: self.ncols,
            data: self.data[start * self.ncols..end * self.ncols].to_vec(),
        }
    }
}
