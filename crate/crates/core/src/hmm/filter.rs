//! Log-domain forward filtering, smoothing and backward sampling.

use rand::Rng;

use super::{EmissionParams, StatePath, TransitionModel};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::math::log_sum_exp;

/// Log transition matrices for every step `t -> t+1`.
#[derive(Debug, Clone)]
enum LogTransitions {
    Constant(Vec<f64>),
    Varying(Vec<f64>),
}

impl LogTransitions {
    fn build(model: &TransitionModel, x_trans: &Design, steps: usize) -> Result<Self> {
        let m = model.states();
        if !model.is_time_varying() {
            let mut buf = vec![0.0; m * m];
            model.log_matrix_into(&[], &mut buf)?;
            return Ok(LogTransitions::Constant(buf));
        }
        if x_trans.nrows() < steps {
            return Err(Error::Dimension(format!(
                "transition design has {} rows, need {steps}",
                x_trans.nrows()
            )));
        }
        let mut buf = vec![0.0; steps * m * m];
        for t in 0..steps {
            model.log_matrix_into(x_trans.row(t), &mut buf[t * m * m..(t + 1) * m * m])?;
        }
        Ok(LogTransitions::Varying(buf))
    }

    /// Row-major log matrix for the move out of time `t`.
    #[inline]
    fn at(&self, t: usize, m: usize) -> &[f64] {
        match self {
            LogTransitions::Constant(b) => b,
            LogTransitions::Varying(b) => &b[t * m * m..(t + 1) * m * m],
        }
    }
}

/// Output of [`forward_filter`]; consumed by the smoother and the sampler.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    m: usize,
    log_filtered: Vec<f64>,
    log_trans: LogTransitions,
    pub loglik: f64,
}

impl ForwardPass {
    pub fn len(&self) -> usize {
        self.log_filtered.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.log_filtered.is_empty()
    }

    pub fn states(&self) -> usize {
        self.m
    }

    pub fn log_filtered(&self, t: usize) -> &[f64] {
        &self.log_filtered[t * self.m..(t + 1) * self.m]
    }

    /// `P(Z_t = . | y_1..t)`
    pub fn filtered(&self, t: usize) -> Vec<f64> {
        self.log_filtered(t).iter().map(|v| v.exp()).collect()
    }

    pub fn filtered_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|t| self.filtered(t)).collect()
    }
}

fn check_dims(
    y: &[f64],
    x_mean: &Design,
    emissions: &EmissionParams,
    trans: &TransitionModel,
    init: &[f64],
) -> Result<usize> {
    let m = emissions.states();
    if y.is_empty() {
        return Err(Error::Invalid("empty observation sequence".into()));
    }
    if x_mean.nrows() != y.len() || x_mean.ncols() != emissions.n_coefs() {
        return Err(Error::Dimension(format!(
            "mean design {}x{} for {} observations and {} coefficients",
            x_mean.nrows(),
            x_mean.ncols(),
            y.len(),
            emissions.n_coefs()
        )));
    }
    if trans.states() != m || init.len() != m {
        return Err(Error::Dimension(format!(
            "{m} emission states, {} transition states, {} initial probabilities",
            trans.states(),
            init.len()
        )));
    }
    if (init.iter().sum::<f64>() - 1.0).abs() > 1e-9 || init.iter().any(|p| *p < 0.0) {
        return Err(Error::Invalid("initial distribution is not a probability vector".into()));
    }
    Ok(m)
}

/// Forward filter in the log domain with per-step normalisation.
///
/// The covariate row `t` of `x_trans` governs the move from `t` to `t + 1`,
/// so only its first `T - 1` rows are used.
pub fn forward_filter(
    y: &[f64],
    x_mean: &Design,
    x_trans: &Design,
    emissions: &EmissionParams,
    trans: &TransitionModel,
    init: &[f64],
) -> Result<ForwardPass> {
    let m = check_dims(y, x_mean, emissions, trans, init)?;
    let t_len = y.len();
    let log_trans = LogTransitions::build(trans, x_trans, t_len - 1)?;
    let mut log_filtered = vec![0.0; t_len * m];
    let mut alpha = vec![0.0; m];
    let mut terms = vec![0.0; m];
    let mut loglik = 0.0;

    for t in 0..t_len {
        let x = x_mean.row(t);
        for j in 0..m {
            let le = emissions.log_density(j, y[t], x);
            alpha[j] = if t == 0 {
                init[j].ln() + le
            } else {
                let prev = &log_filtered[(t - 1) * m..t * m];
                let lp = log_trans.at(t - 1, m);
                for i in 0..m {
                    terms[i] = prev[i] + lp[i * m + j];
                }
                le + log_sum_exp(&terms)
            };
        }
        let c = log_sum_exp(&alpha);
        if !c.is_finite() {
            return Err(Error::Underflow(t));
        }
        loglik += c;
        for j in 0..m {
            log_filtered[t * m + j] = alpha[j] - c;
        }
    }
    Ok(ForwardPass {
        m,
        log_filtered,
        log_trans,
        loglik,
    })
}

/// `P(Z_t = . | y_1..T)` for every `t`, by the backward recursion over the
/// filtered distributions.
pub fn smoothed_probs(fp: &ForwardPass) -> Vec<Vec<f64>> {
    let m = fp.m;
    let t_len = fp.len();
    let mut log_s = vec![0.0; t_len * m];
    log_s[(t_len - 1) * m..].copy_from_slice(fp.log_filtered(t_len - 1));
    let mut pred = vec![0.0; m];
    let mut terms = vec![0.0; m];
    for t in (0..t_len - 1).rev() {
        let lf = fp.log_filtered(t);
        let lp = fp.log_trans.at(t, m);
        for j in 0..m {
            for i in 0..m {
                terms[i] = lf[i] + lp[i * m + j];
            }
            pred[j] = log_sum_exp(&terms);
        }
        let (head, tail) = log_s.split_at_mut((t + 1) * m);
        let next = &tail[..m];
        let cur = &mut head[t * m..];
        for i in 0..m {
            for j in 0..m {
                terms[j] = if next[j] == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    lp[i * m + j] + next[j] - pred[j]
                };
            }
            cur[i] = lf[i] + log_sum_exp(&terms);
        }
        let c = log_sum_exp(cur);
        cur.iter_mut().for_each(|v| *v -= c);
    }
    log_s
        .chunks(m)
        .map(|row| {
            let p: Vec<f64> = row.iter().map(|v| v.exp()).collect();
            let s: f64 = p.iter().sum();
            p.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

/// Draw index from unnormalised log weights.
pub(crate) fn sample_log_categorical<R: Rng + ?Sized>(rng: &mut R, log_w: &[f64]) -> usize {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = log_w.iter().map(|w| (w - max).exp()).sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, w) in log_w.iter().enumerate() {
        let p = (w - max).exp();
        if p > 0.0 {
            last = i;
            if u < p {
                return i;
            }
            u -= p;
        }
    }
    last
}

/// Draw a state path from its exact joint posterior given the parameters
/// behind `fp`: `Z_T` from the last filtered row, then backwards
/// `Z_t ∝ filtered_t(i) p_t(i, z_{t+1})`.
pub fn ffbs_sample<R: Rng + ?Sized>(rng: &mut R, fp: &ForwardPass) -> StatePath {
    let m = fp.m;
    let t_len = fp.len();
    let mut path = vec![0u8; t_len];
    if m == 1 {
        return StatePath::constant(t_len, 0);
    }
    path[t_len - 1] = sample_log_categorical(rng, fp.log_filtered(t_len - 1)) as u8;
    let mut w = vec![0.0; m];
    for t in (0..t_len - 1).rev() {
        let lf = fp.log_filtered(t);
        let lp = fp.log_trans.at(t, m);
        let next = path[t + 1] as usize;
        for i in 0..m {
            w[i] = lf[i] + lp[i * m + next];
        }
        path[t] = sample_log_categorical(rng, &w) as u8;
    }
    StatePath::new(path, m).expect("labels drawn within range")
}
