//! Series transforms applied before alignment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{mean, sample_variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// `100 (log p[t+1] - log p[t])`
    PctLogReturn,
    /// `log p[t+1] - log p[t]`
    LogReturn,
    /// `log p[t]`
    LogLevel,
    /// Centre and scale to unit sample standard deviation.
    Normalize,
    /// `100 (x[t+1] - x[t]) / x[t]`
    PctChange,
    Identity,
}

impl TransformKind {
    /// Whether the transform consumes one leading observation.
    pub fn differences(self) -> bool {
        matches!(
            self,
            TransformKind::PctLogReturn | TransformKind::LogReturn | TransformKind::PctChange
        )
    }
}

fn check_positive(xs: &[f64]) -> Result<()> {
    match xs.iter().position(|&p| !(p > 0.0)) {
        Some(index) => Err(Error::NonPositive {
            index,
            value: xs[index],
        }),
        None => Ok(()),
    }
}

fn check_len(xs: &[f64], min: usize) -> Result<()> {
    if xs.len() < min {
        return Err(Error::Invalid(format!(
            "need at least {min} observations, got {}",
            xs.len()
        )));
    }
    Ok(())
}

/// Percentage log returns `100 (log p[t+1] - log p[t])`.
pub fn pct_log_returns(prices: &[f64]) -> Result<Vec<f64>> {
    Ok(log_returns(prices)?.into_iter().map(|r| 100.0 * r).collect())
}

pub fn log_returns(prices: &[f64]) -> Result<Vec<f64>> {
    check_len(prices, 2)?;
    check_positive(prices)?;
    Ok(prices.windows(2).map(|w| w[1].ln() - w[0].ln()).collect())
}

pub fn log_levels(values: &[f64]) -> Result<Vec<f64>> {
    check_positive(values)?;
    Ok(values.iter().map(|v| v.ln()).collect())
}

pub fn pct_change(values: &[f64]) -> Result<Vec<f64>> {
    check_len(values, 2)?;
    if let Some(index) = values[..values.len() - 1].iter().position(|&v| v == 0.0) {
        return Err(Error::ZeroDivision { index });
    }
    Ok(values
        .windows(2)
        .map(|w| 100.0 * (w[1] - w[0]) / w[0])
        .collect())
}

/// Location and scale frozen from a reference window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizeStats {
    pub mean: f64,
    pub sd: f64,
}

impl NormalizeStats {
    pub fn fit(values: &[f64]) -> Result<Self> {
        check_len(values, 2)?;
        let sd = sample_variance(values).sqrt();
        if !(sd > 0.0) || !sd.is_finite() {
            return Err(Error::ZeroVariance(format!("{} values", values.len())));
        }
        Ok(Self {
            mean: mean(values),
            sd,
        })
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| (v - self.mean) / self.sd).collect()
    }
}

/// Standardise to sample mean 0 and sample (n - 1) standard deviation 1.
pub fn normalize(values: &[f64]) -> Result<Vec<f64>> {
    let stats = NormalizeStats::fit(values)?;
    let mut out = stats.apply(values);
    // A second pass removes the rounding residue of the first.
    let residual = mean(&out);
    out.iter_mut().for_each(|v| *v -= residual);
    let sd = sample_variance(&out).sqrt();
    out.iter_mut().for_each(|v| *v /= sd);
    Ok(out)
}
