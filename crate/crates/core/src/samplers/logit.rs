//! Transition-parameter updates: Pólya-Gamma Gibbs for multinomial-logit
//! coefficients and the conjugate Dirichlet update for constant rows.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::linreg::draw_gaussian_canonical;
use super::pg::sample_pg1;
use crate::design::Design;
use crate::error::{Error, Result};
use crate::hmm::StatePath;
use crate::math::{dot, log_sum_exp};

/// `coefs[i][j][k]`: row `i`, destination `j`, covariate `k`. The last
/// destination is the zero baseline.
pub type LogitCoefs = Vec<Vec<Vec<f64>>>;

fn check(path: &StatePath, x_trans: &Design, coefs: &LogitCoefs) -> Result<(usize, usize)> {
    let m = coefs.len();
    let k = x_trans.ncols();
    if coefs.iter().any(|r| r.len() != m || r.iter().any(|c| c.len() != k)) {
        return Err(Error::Dimension(format!("coefficients are not {m}x{m}x{k}")));
    }
    if path.len() > 0 && x_trans.nrows() + 1 < path.len() {
        return Err(Error::Dimension("transition design shorter than path".into()));
    }
    if coefs.iter().any(|r| r[m - 1].iter().any(|&b| b != 0.0)) {
        return Err(Error::Invalid("baseline coefficients must be zero".into()));
    }
    Ok((m, k))
}

/// Times `t` with `z_t = i` for each row `i`, over transitions `t -> t+1`.
fn visits(path: &StatePath, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); m];
    for t in 0..path.len().saturating_sub(1) {
        out[path.get(t)].push(t);
    }
    out
}

/// `sum_t log p_t(z_t, z_{t+1})` under the multinomial link.
pub fn transition_loglik(path: &StatePath, x_trans: &Design, coefs: &LogitCoefs) -> f64 {
    let m = coefs.len();
    let mut eta = vec![0.0; m];
    let mut ll = 0.0;
    for t in 0..path.len().saturating_sub(1) {
        let row = &coefs[path.get(t)];
        let x = x_trans.row(t);
        for (j, b) in row.iter().enumerate() {
            eta[j] = dot(x, b);
        }
        ll += eta[path.get(t + 1)] - log_sum_exp(&eta);
    }
    ll
}

fn draw_prior_cell<R: Rng + ?Sized>(rng: &mut R, cell: &mut [f64], active: &[usize], prior_var: f64) {
    cell.iter_mut().for_each(|b| *b = 0.0);
    let sd = prior_var.sqrt();
    for &a in active {
        cell[a] = sd * rng.sample::<f64, _>(StandardNormal);
    }
}

/// One sweep over all non-baseline cells, rows and destinations in
/// ascending order, each from its Pólya-Gamma augmented full conditional.
///
/// Only the covariate columns listed in `active` are updated; the others
/// stay at zero. Rows never visited by the path are drawn from the prior.
pub fn gibbs_multinomial_logit<R: Rng + ?Sized>(
    rng: &mut R,
    path: &StatePath,
    x_trans: &Design,
    mut coefs: LogitCoefs,
    prior_var: f64,
    active: &[usize],
) -> Result<LogitCoefs> {
    let (m, k) = check(path, x_trans, &coefs)?;
    if active.iter().any(|&a| a >= k) {
        return Err(Error::Dimension("active column out of range".into()));
    }
    let visits = visits(path, m);
    let ka = active.len();
    let mut others = vec![0.0; m - 1];
    for (i, times) in visits.iter().enumerate() {
        if times.is_empty() {
            for j in 0..m - 1 {
                draw_prior_cell(rng, &mut coefs[i][j], active, prior_var);
            }
            continue;
        }
        // Linear predictors for every visit and destination.
        let mut eta: Vec<Vec<f64>> = times
            .iter()
            .map(|&t| coefs[i].iter().map(|b| dot(x_trans.row(t), b)).collect())
            .collect();
        for j in 0..m - 1 {
            let mut q = DMatrix::<f64>::identity(ka, ka) / prior_var;
            let mut r = DVector::<f64>::zeros(ka);
            for (v, &t) in times.iter().enumerate() {
                let e = &eta[v];
                let mut n = 0;
                for (l, &el) in e.iter().enumerate() {
                    if l != j {
                        others[n] = el;
                        n += 1;
                    }
                }
                let offset = log_sum_exp(&others);
                let omega = sample_pg1(rng, e[j] - offset);
                let kappa = if path.get(t + 1) == j { 0.5 } else { -0.5 };
                let x = x_trans.row(t);
                for (a, &ca) in active.iter().enumerate() {
                    r[a] += x[ca] * (kappa + omega * offset);
                    for (b, &cb) in active.iter().enumerate().skip(a) {
                        q[(a, b)] += omega * x[ca] * x[cb];
                    }
                }
            }
            q.fill_lower_triangle_with_upper_triangle();
            let beta = draw_gaussian_canonical(rng, q, &r)?;
            let cell = &mut coefs[i][j];
            cell.iter_mut().for_each(|b| *b = 0.0);
            for (a, &ca) in active.iter().enumerate() {
                cell[ca] = beta[a];
            }
            for (v, &t) in times.iter().enumerate() {
                eta[v][j] = dot(x_trans.row(t), &coefs[i][j]);
            }
        }
    }
    Ok(coefs)
}

/// Transition counts `n_ij` along the path.
pub fn transition_counts(path: &StatePath, m: usize) -> Vec<Vec<u64>> {
    let mut counts = vec![vec![0u64; m]; m];
    for w in path.as_slice().windows(2) {
        counts[w[0] as usize][w[1] as usize] += 1;
    }
    counts
}

/// Row-wise `Dirichlet(alpha + counts)` draw of a constant transition matrix.
pub fn dirichlet_rows<R: Rng + ?Sized>(rng: &mut R, path: &StatePath, m: usize, alpha: f64) -> Vec<Vec<f64>> {
    transition_counts(path, m)
        .into_iter()
        .map(|row| loop {
            let g: Vec<f64> = row
                .iter()
                .map(|&n| Gamma::new(alpha + n as f64, 1.0).expect("positive shape").sample(rng))
                .collect();
            let s: f64 = g.iter().sum();
            if s > 0.0 && s.is_finite() {
                break g.into_iter().map(|v| v / s).collect();
            }
        })
        .collect()
}
