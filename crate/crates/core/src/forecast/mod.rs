//! Out-of-sample predictive simulation and the scores used to compare
//! models.
//!
//! Parameters stay fixed at their posterior draws across horizons. For
//! horizon `l` the states are filtered on everything observed before the
//! target row, propagated one step through the transition in force, and a
//! value is drawn from the selected state's regression. Covariates at the
//! target row are taken as known.

mod report;
mod scores;

pub use report::{
    compare_models, path_frequencies, spot_horizons, state_summary, EvaluationReport, Ranking, StateSummary,
    SPOT_HORIZONS,
};
pub use scores::{coverage_report, crps_empirical, mse, replicated_bands, Coverage};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::AlignedDataset;
use crate::error::{Error, Result};
use crate::hmm::{forward_filter, sample_log_categorical, uniform_init};
use crate::math::log_sum_exp;
use crate::models::{ModelDesign, PosteriorDraws};

/// Posterior-predictive draws for one horizon with the realised value.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveSample {
    /// One-based horizon.
    pub horizon: usize,
    pub draws: Vec<f64>,
    pub realized: f64,
}

/// Forecasts for rows `train_len .. train_len + horizons` of `design`,
/// whose first `train_len` rows are the fitting window.
pub fn one_step_forecasts<R: Rng + ?Sized>(
    rng: &mut R,
    draws: &PosteriorDraws,
    design: &ModelDesign,
    train_len: usize,
    horizons: usize,
) -> Result<Vec<PredictiveSample>> {
    if draws.is_empty() {
        return Err(Error::Invalid("no posterior draws".into()));
    }
    if horizons == 0 || train_len == 0 {
        return Err(Error::Invalid("need at least one training row and one horizon".into()));
    }
    if design.first_row != draws.layout.first_row || design.mean_names != draws.layout.mean_names {
        return Err(Error::Dimension("design does not match the fitted model".into()));
    }
    if design.len() < train_len + horizons {
        return Err(Error::MissingHorizon(design.len().saturating_sub(train_len) + 1));
    }
    let m = draws.states();
    let observed = train_len + horizons - 1;
    let y = &design.y[..observed];
    let x_mean = design.x_mean.slice_rows(0, observed);
    let x_trans = design.x_trans.slice_rows(0, observed);
    let init = uniform_init(m);
    let mut out: Vec<PredictiveSample> = (0..horizons)
        .map(|l| PredictiveSample {
            horizon: l + 1,
            draws: Vec::with_capacity(draws.len()),
            realized: design.y[train_len + l],
        })
        .collect();
    let mut log_p = vec![0.0; m * m];
    let mut log_w = vec![0.0; m];
    let mut terms = vec![0.0; m];
    for d in &draws.draws {
        let fp = if m > 1 {
            Some(forward_filter(y, &x_mean, &x_trans, &d.emissions, &d.transition, &init)?)
        } else {
            None
        };
        for (l, sample) in out.iter_mut().enumerate() {
            let r = train_len + l;
            let s = match &fp {
                None => 0,
                Some(fp) => {
                    d.transition.log_matrix_into(design.x_trans.row(r - 1), &mut log_p)?;
                    let prev = fp.log_filtered(r - 1);
                    for j in 0..m {
                        for i in 0..m {
                            terms[i] = prev[i] + log_p[i * m + j];
                        }
                        log_w[j] = log_sum_exp(&terms);
                    }
                    sample_log_categorical(rng, &log_w)
                }
            };
            let mu = d.emissions.mean(s, design.x_mean.row(r));
            sample.draws.push(mu + d.emissions.sigma2[s].sqrt() * rng.sample::<f64, _>(StandardNormal));
        }
    }
    Ok(out)
}

/// Forecast the last `horizons` rows of `full`, with the draws fitted on
/// the rows before them. The training part must match the draws'
/// fingerprint.
pub fn forecast_dataset<R: Rng + ?Sized>(
    rng: &mut R,
    draws: &PosteriorDraws,
    full: &AlignedDataset,
    horizons: usize,
) -> Result<Vec<PredictiveSample>> {
    if horizons >= full.len() {
        return Err(Error::MissingHorizon(horizons));
    }
    let train_rows = full.len() - horizons;
    draws.check_fingerprint(&full.head(train_rows).fingerprint())?;
    let design = ModelDesign::build(full, &draws.spec)?;
    one_step_forecasts(rng, draws, &design, train_rows - design.first_row, horizons)
}

#[cfg(test)]
mod tests;
