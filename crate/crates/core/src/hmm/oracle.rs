//! Exhaustive path enumeration, used as an independent check on the
//! recursions in [`super::filter`]. Exponential in `T`; small instances only.

use statrs::distribution::{Continuous, Normal};

use super::{EmissionParams, TransitionModel};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::math::log_sum_exp;

const MAX_PATHS: f64 = 1e7;

/// Linear-domain transition matrix, computed without the filter's helpers.
fn direct_matrix(trans: &TransitionModel, x: &[f64]) -> Vec<Vec<f64>> {
    match trans {
        TransitionModel::Constant { matrix } => matrix.clone(),
        TransitionModel::Multinomial { coefs } => coefs
            .iter()
            .map(|row| {
                let w: Vec<f64> = row
                    .iter()
                    .map(|b| b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>().exp())
                    .collect();
                let total: f64 = w.iter().sum();
                w.into_iter().map(|v| v / total).collect()
            })
            .collect(),
    }
}

struct Instance<'a> {
    y: &'a [f64],
    x_mean: &'a Design,
    x_trans: &'a Design,
    emissions: &'a EmissionParams,
    trans: &'a TransitionModel,
    init: &'a [f64],
}

impl Instance<'_> {
    fn check(&self) -> Result<(usize, usize)> {
        let m = self.emissions.states();
        let t_len = self.y.len();
        let paths = (m as f64).powi(t_len as i32);
        if paths > MAX_PATHS {
            return Err(Error::TooLarge(paths));
        }
        if t_len == 0 || self.x_mean.nrows() != t_len || self.init.len() != m {
            return Err(Error::Dimension("inconsistent oracle instance".into()));
        }
        if self.trans.is_time_varying() && self.x_trans.nrows() + 1 < t_len {
            return Err(Error::Dimension("transition design too short".into()));
        }
        Ok((m, t_len))
    }

    fn log_joint(&self, path: &[usize], mats: &[Vec<Vec<f64>>]) -> f64 {
        let mut lp = self.init[path[0]].ln();
        for (t, &s) in path.iter().enumerate() {
            let mean = self.emissions.coefs[s]
                .iter()
                .zip(self.x_mean.row(t))
                .map(|(b, x)| b * x)
                .sum::<f64>();
            let normal = Normal::new(mean, self.emissions.sigma2[s].sqrt()).expect("valid normal");
            lp += normal.ln_pdf(self.y[t]);
            if t + 1 < path.len() {
                lp += mats[t][s][path[t + 1]].ln();
            }
        }
        lp
    }

    fn matrices(&self, t_len: usize) -> Vec<Vec<Vec<f64>>> {
        (0..t_len.saturating_sub(1))
            .map(|t| {
                let x = if self.trans.is_time_varying() { self.x_trans.row(t) } else { &[] };
                direct_matrix(self.trans, x)
            })
            .collect()
    }

    /// Every path with its log joint density `log p(z, y)`.
    fn all_paths(&self) -> Result<Vec<(Vec<usize>, f64)>> {
        let (m, t_len) = self.check()?;
        let mats = self.matrices(t_len);
        let total = m.pow(t_len as u32);
        let mut out = Vec::with_capacity(total);
        let mut path = vec![0usize; t_len];
        for code in 0..total {
            let mut c = code;
            for slot in path.iter_mut().rev() {
                *slot = c % m;
                c /= m;
            }
            out.push((path.clone(), self.log_joint(&path, &mats)));
        }
        Ok(out)
    }
}

/// Exact marginal log-likelihood by summing over all `m^T` paths.
pub fn brute_force_loglik(
    y: &[f64],
    x_mean: &Design,
    x_trans: &Design,
    emissions: &EmissionParams,
    trans: &TransitionModel,
    init: &[f64],
) -> Result<f64> {
    let inst = Instance { y, x_mean, x_trans, emissions, trans, init };
    let joints: Vec<f64> = inst.all_paths()?.into_iter().map(|(_, lp)| lp).collect();
    Ok(log_sum_exp(&joints))
}

/// Posterior probability of every path, in lexicographic path order.
pub fn enumerate_posterior(
    y: &[f64],
    x_mean: &Design,
    x_trans: &Design,
    emissions: &EmissionParams,
    trans: &TransitionModel,
    init: &[f64],
) -> Result<Vec<(Vec<usize>, f64)>> {
    let inst = Instance { y, x_mean, x_trans, emissions, trans, init };
    let paths = inst.all_paths()?;
    let norm = log_sum_exp(&paths.iter().map(|(_, lp)| *lp).collect::<Vec<_>>());
    Ok(paths
        .into_iter()
        .map(|(p, lp)| (p, (lp - norm).exp()))
        .collect())
}

/// Smoothed marginals `P(Z_t = s | y)` from the enumerated posterior.
pub fn enumerate_marginals(posterior: &[(Vec<usize>, f64)], m: usize) -> Vec<Vec<f64>> {
    let t_len = posterior.first().map_or(0, |(p, _)| p.len());
    let mut out = vec![vec![0.0; m]; t_len];
    for (path, prob) in posterior {
        for (t, &s) in path.iter().enumerate() {
            out[t][s] += prob;
        }
    }
    out
}
