use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use super::design::ModelDesign;
use super::draws::{Draw, PosteriorDraws};
use super::spec::{Family, McmcConfig, ModelSpec, Priors};
use crate::data::AlignedDataset;
use crate::error::{Error, Result};
use crate::hmm::{ffbs_sample, forward_filter, uniform_init, EmissionParams, StatePath, TransitionModel};
use crate::math::normal_log_pdf;
use crate::samplers::{
    dirichlet_rows, gibbs_from_stats, gibbs_multinomial_logit, ols, rj_variable_select, InclusionState,
    LinearRegressionPrior, RegressionStats,
};
use crate::SeededRng;

/// Fit with the default priors.
pub fn fit(data: &AlignedDataset, spec: &ModelSpec, config: &McmcConfig) -> Result<PosteriorDraws> {
    fit_with_priors(data, spec, config, &Priors::default())
}

/// Two-state drift and variance switching with a constant transition matrix.
pub fn fit_msrw(data: &AlignedDataset, config: &McmcConfig) -> Result<PosteriorDraws> {
    fit(data, &ModelSpec::msrw(), config)
}

pub fn fit_with_priors(
    data: &AlignedDataset,
    spec: &ModelSpec,
    config: &McmcConfig,
    priors: &Priors,
) -> Result<PosteriorDraws> {
    config.validate()?;
    priors.validate()?;
    let design = ModelDesign::build(data, spec)?;
    let mut out = fit_design(&design, spec, config, priors)?;
    out.fingerprint = data.fingerprint();
    Ok(out)
}

/// Descending-variance ordering: `perm[a]` is the old label of new state `a`.
fn variance_order(sigma2: &[f64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..sigma2.len()).collect();
    perm.sort_by(|&a, &b| sigma2[b].total_cmp(&sigma2[a]).then(a.cmp(&b)));
    perm
}

fn relabel(d: Draw) -> Draw {
    let perm = variance_order(&d.emissions.sigma2);
    if perm.iter().enumerate().all(|(a, &p)| a == p) {
        return d;
    }
    Draw {
        emissions: d.emissions.permuted(&perm),
        transition: d.transition.permuted(&perm),
        path: d.path.relabeled(&perm),
        inclusion: d.inclusion,
        loglik: d.loglik,
    }
}

fn state_stats(design: &ModelDesign, path: &StatePath, m: usize) -> Vec<RegressionStats> {
    let mut stats = vec![RegressionStats::new(design.x_mean.ncols()); m];
    for (t, &y) in design.y.iter().enumerate() {
        stats[path.get(t)].push(y, design.x_mean.row(t));
    }
    stats
}

/// Deterministic start: OLS coefficients with the intercepts fanned out
/// around the fit, residual variance spread over a factor of two per state.
fn initial_emissions(design: &ModelDesign, m: usize) -> Result<EmissionParams> {
    let (beta, resvar) = ols(&design.y, &design.x_mean)?;
    let resvar = if resvar > 0.0 { resvar } else { 1.0 };
    let sd = resvar.sqrt();
    let centre = (m as f64 - 1.0) / 2.0;
    let mut coefs = Vec::with_capacity(m);
    let mut sigma2 = Vec::with_capacity(m);
    for s in 0..m {
        let mut b = beta.clone();
        b[0] += 0.25 * sd * (s as f64 - centre);
        coefs.push(b);
        sigma2.push(resvar * 2f64.powf(centre - s as f64));
    }
    EmissionParams::new(coefs, sigma2)
}

fn single_regime(
    design: &ModelDesign,
    spec: &ModelSpec,
    config: &McmcConfig,
    prior: &LinearRegressionPrior,
    rng: &mut SeededRng,
) -> Result<Vec<Draw>> {
    let n = design.len();
    let stats = RegressionStats::from_rows(&design.y, &design.x_mean)?;
    let (_, mut sigma2) = ols(&design.y, &design.x_mean)?;
    if sigma2 <= 0.0 {
        sigma2 = 1.0;
    }
    let path = StatePath::constant(n, 0);
    let transition = TransitionModel::uniform(1);
    let mut draws = Vec::with_capacity(config.retained());
    for it in 0..config.iterations {
        let (coefs, s2) = gibbs_from_stats(rng, &stats, prior, sigma2)?;
        sigma2 = s2;
        if config.keeps(it) {
            let emissions = EmissionParams::new(vec![coefs], vec![sigma2])?;
            let loglik: f64 = (0..n)
                .map(|t| normal_log_pdf(design.y[t], emissions.mean(0, design.x_mean.row(t)), sigma2))
                .sum();
            if !loglik.is_finite() {
                return Err(Error::Diverged { iteration: it });
            }
            draws.push(Draw {
                emissions,
                transition: transition.clone(),
                path: path.clone(),
                inclusion: None,
                loglik,
            });
        }
    }
    debug_assert_eq!(spec.states, 1);
    Ok(draws)
}

/// Run the sampler on a prepared design. The returned fingerprint is empty.
pub fn fit_design(
    design: &ModelDesign,
    spec: &ModelSpec,
    config: &McmcConfig,
    priors: &Priors,
) -> Result<PosteriorDraws> {
    config.validate()?;
    priors.validate()?;
    let m = spec.states;
    let k = design.x_mean.ncols();
    let prior = LinearRegressionPrior::isotropic(k, priors.coef_var, priors.sigma_shape, priors.resolved_scale(&design.y))?;
    let mut rng = SeededRng::seed_from_u64(config.seed);
    let mut rj_tries = 0usize;
    let mut rj_accepts = 0usize;

    let draws = if !spec.family.is_switching() {
        single_regime(design, spec, config, &prior, &mut rng)?
    } else {
        let kt = design.x_trans.ncols();
        let init = uniform_init(m);
        let mut emissions = initial_emissions(design, m)?;
        let mut transition = match spec.family {
            Family::Nhhm => TransitionModel::zero_multinomial(m, kt),
            _ => TransitionModel::uniform(m),
        };
        let mut inclusion = spec.rj_enabled.then(|| InclusionState::all(kt));
        let all_columns: Vec<usize> = (0..kt).collect();
        let mut draws = Vec::with_capacity(config.retained());

        for it in 0..config.iterations {
            // (a) hidden path
            let fp = forward_filter(&design.y, &design.x_mean, &design.x_trans, &emissions, &transition, &init)
                .map_err(|e| match e {
                    Error::Underflow(_) | Error::NonFinite(_) => Error::Diverged { iteration: it },
                    e => e,
                })?;
            if !fp.loglik.is_finite() {
                return Err(Error::Diverged { iteration: it });
            }
            let path = ffbs_sample(&mut rng, &fp);

            // (b) state regressions
            let stats = state_stats(design, &path, m);
            let mut coefs = Vec::with_capacity(m);
            let mut sigma2 = Vec::with_capacity(m);
            for (s, st) in stats.iter().enumerate() {
                let (b, s2) = gibbs_from_stats(&mut rng, st, &prior, emissions.sigma2[s])?;
                coefs.push(b);
                sigma2.push(s2);
            }
            emissions = EmissionParams::new(coefs, sigma2)?;

            // (c) transitions, then the variable search
            transition = match transition {
                TransitionModel::Multinomial { coefs } => {
                    let active = inclusion.as_ref().map(InclusionState::active);
                    let active = active.as_deref().unwrap_or(&all_columns);
                    let mut coefs =
                        gibbs_multinomial_logit(&mut rng, &path, &design.x_trans, coefs, priors.transition_var, active)?;
                    if let Some(state) = inclusion.as_mut() {
                        rj_tries += 1;
                        rj_accepts += rj_variable_select(
                            &mut rng,
                            &path,
                            &design.x_trans,
                            &mut coefs,
                            state,
                            priors.transition_var,
                            priors.inclusion,
                        )? as usize;
                    }
                    TransitionModel::Multinomial { coefs }
                }
                TransitionModel::Constant { .. } => {
                    TransitionModel::Constant { matrix: dirichlet_rows(&mut rng, &path, m, priors.dirichlet_alpha) }
                }
            };

            if config.keeps(it) {
                draws.push(relabel(Draw {
                    emissions: emissions.clone(),
                    transition: transition.clone(),
                    path,
                    inclusion: inclusion.clone(),
                    loglik: fp.loglik,
                }));
            }
        }
        draws
    };

    Ok(PosteriorDraws {
        spec: spec.clone(),
        config: *config,
        priors: *priors,
        fingerprint: String::new(),
        layout: design.layout(),
        rj_acceptance: (rj_tries > 0).then(|| rj_accepts as f64 / rj_tries as f64),
        draws,
    })
}

/// In-sample replicated data: row `t`, column `n` is a draw from the
/// emission of draw `n` in its own sampled state at `t`.
pub fn replicate_insample<R: Rng + ?Sized>(
    rng: &mut R,
    draws: &PosteriorDraws,
    design: &ModelDesign,
) -> Result<Vec<Vec<f64>>> {
    if draws.is_empty() {
        return Err(Error::Invalid("no posterior draws".into()));
    }
    let n = design.len();
    if draws.draws.iter().any(|d| d.path.len() != n) || design.x_mean.ncols() != draws.layout.mean_names.len() {
        return Err(Error::Dimension("draws do not match the design".into()));
    }
    let mut out = vec![vec![0.0; draws.len()]; n];
    for (col, d) in draws.draws.iter().enumerate() {
        for (t, row) in out.iter_mut().enumerate() {
            let s = d.path.get(t);
            let mu = d.emissions.mean(s, design.x_mean.row(t));
            row[col] = mu + d.emissions.sigma2[s].sqrt() * rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(out)
}
