use serde::{Deserialize, Serialize};

use super::spec::{Family, ModelSpec};
use crate::data::{AlignedDataset, AR_COLUMN, INTERCEPT};
use crate::design::Design;
use crate::error::{Error, Result};

/// Mean and transition designs for one model, with the leading rows that
/// higher-order lags consume removed.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDesign {
    pub y: Vec<f64>,
    pub x_mean: Design,
    pub x_trans: Design,
    pub mean_names: Vec<String>,
    pub trans_names: Vec<String>,
    /// Dataset row of design row 0.
    pub first_row: usize,
}

/// Column labels and row offset, stored with posterior draws.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignLayout {
    pub mean_names: Vec<String>,
    pub trans_names: Vec<String>,
    pub first_row: usize,
}

fn lag_name(j: usize) -> String {
    format!("AR({j})")
}

impl ModelDesign {
    pub fn build(data: &AlignedDataset, spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        spec.validate_against(data)?;
        let idx = |n: &str| data.column_index(n).expect("validated");
        let n = data.len();

        let (x_mean, mean_names, first_row) = if spec.family == Family::Ar {
            let p = spec.ar_order;
            let ar = data.ar_column().expect("validated");
            if n < p + 2 * (p + 1) {
                return Err(Error::Invalid(format!("{n} rows too short for AR({p})")));
            }
            let first = p - 1;
            let mut buf = Vec::with_capacity((n - first) * (p + 1));
            for t in first..n {
                buf.push(1.0);
                // x[t, ar] holds y_{t-1}, so lag j sits in row t - j + 1.
                buf.extend((1..=p).map(|j| data.x.get(t + 1 - j, ar)));
            }
            let names = std::iter::once(INTERCEPT.to_string()).chain((1..=p).map(lag_name)).collect();
            (Design::from_row_major(n - first, p + 1, buf)?, names, first)
        } else {
            let mut cols = vec![0];
            cols.extend(spec.mean_predictors.iter().map(|s| idx(s)));
            if spec.ar_order == 1 {
                cols.push(idx(AR_COLUMN));
            }
            let names = cols.iter().map(|&j| data.names[j].clone()).collect();
            (data.x.select_columns(&cols), names, 0)
        };

        let mut tcols = vec![0];
        tcols.extend(spec.transition_predictors.iter().map(|s| idx(s)));
        let x_trans = data.x.select_columns(&tcols).slice_rows(first_row, n);
        let trans_names = tcols.iter().map(|&j| data.names[j].clone()).collect();
        Ok(Self {
            y: data.y[first_row..].to_vec(),
            x_mean,
            x_trans,
            mean_names,
            trans_names,
            first_row,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// First `n` design rows.
    pub fn head(&self, n: usize) -> Self {
        Self {
            y: self.y[..n].to_vec(),
            x_mean: self.x_mean.slice_rows(0, n),
            x_trans: self.x_trans.slice_rows(0, n),
            mean_names: self.mean_names.clone(),
            trans_names: self.trans_names.clone(),
            first_row: self.first_row,
        }
    }

    pub fn layout(&self) -> DesignLayout {
        DesignLayout {
            mean_names: self.mean_names.clone(),
            trans_names: self.trans_names.clone(),
            first_row: self.first_row,
        }
    }
}
