use std::fmt;

use crate::error::{Error, Result};
use crate::math::{quantile_sorted, sort_floats};

use super::PredictiveSample;

/// `E|X - y| - E|X - X'| / 2` over the empirical distribution of the
/// draws. The pairwise term uses the order-statistic identity
/// `sum_ij |x_i - x_j| = 2 sum_i (2i - n - 1) x_(i)`.
pub fn crps_empirical(sample: &PredictiveSample) -> Result<f64> {
    let n = sample.draws.len();
    if n < 2 {
        return Err(Error::Invalid(format!("CRPS needs at least 2 draws, got {n}")));
    }
    let mut x = sample.draws.clone();
    sort_floats(&mut x);
    let nf = n as f64;
    let abs_err = x.iter().map(|v| (v - sample.realized).abs()).sum::<f64>() / nf;
    if abs_err == 0.0 {
        return Ok(0.0);
    }
    let spread = x
        .iter()
        .enumerate()
        .map(|(i, v)| (2.0 * (i + 1) as f64 - nf - 1.0) * v)
        .sum::<f64>()
        / (nf * nf);
    Ok((abs_err - spread).max(0.0))
}

pub fn mse(sample: &PredictiveSample) -> Result<f64> {
    if sample.draws.is_empty() {
        return Err(Error::Invalid("MSE needs at least one draw".into()));
    }
    Ok(sample.draws.iter().map(|v| (v - sample.realized).powi(2)).sum::<f64>() / sample.draws.len() as f64)
}

/// Observations falling outside row-wise empirical quantile bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coverage {
    pub outliers: usize,
    pub total: usize,
}

impl Coverage {
    pub fn proportion(&self) -> f64 {
        self.outliers as f64 / self.total as f64
    }
}

/// `0.05 (121/2114)`: the proportion cut to two decimals, then the counts.
impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hundredths = if self.total == 0 { 0 } else { self.outliers * 100 / self.total };
        write!(f, "{}.{:02} ({}/{})", hundredths / 100, hundredths % 100, self.outliers, self.total)
    }
}

fn check_q(lower_q: f64, upper_q: f64) -> Result<()> {
    if !(0.0 < lower_q && lower_q < upper_q && upper_q < 1.0) {
        return Err(Error::Invalid(format!("quantiles {lower_q}, {upper_q}")));
    }
    Ok(())
}

/// Row-wise `(lower, upper)` quantiles of a `T x N` replicated matrix.
pub fn replicated_bands(replicated: &[Vec<f64>], lower_q: f64, upper_q: f64) -> Result<Vec<(f64, f64)>> {
    check_q(lower_q, upper_q)?;
    replicated
        .iter()
        .enumerate()
        .map(|(t, row)| {
            if row.is_empty() {
                return Err(Error::Dimension(format!("replicated row {t} is empty")));
            }
            let mut r = row.clone();
            sort_floats(&mut r);
            Ok((quantile_sorted(&r, lower_q), quantile_sorted(&r, upper_q)))
        })
        .collect()
}

pub fn coverage_report(replicated: &[Vec<f64>], y: &[f64], lower_q: f64, upper_q: f64) -> Result<Coverage> {
    if replicated.len() != y.len() {
        return Err(Error::Dimension(format!("{} replicated rows for {} observations", replicated.len(), y.len())));
    }
    let bands = replicated_bands(replicated, lower_q, upper_q)?;
    let outliers = bands.iter().zip(y).filter(|((lo, hi), v)| **v < *lo || **v > *hi).count();
    Ok(Coverage {
        outliers,
        total: y.len(),
    })
}
