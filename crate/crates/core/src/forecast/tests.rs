use rand::{Rng, SeedableRng};
use statrs::distribution::{ContinuousCDF, Normal};

use super::*;
use crate::data::Role;
use crate::hmm::oracle::{enumerate_marginals, enumerate_posterior};
use crate::hmm::{transition_matrix_at, EmissionParams, StatePath, TransitionModel};
use crate::models::{fit, Draw, McmcConfig, ModelSpec, PosteriorDraws, Priors};
use crate::synthetic::{generate, Covariates, GenerativeSpec};
use crate::SeededRng;

fn fixed_draws(spec: ModelSpec, design: &ModelDesign, draw: Draw, n: usize) -> PosteriorDraws {
    PosteriorDraws {
        spec,
        config: McmcConfig::default(),
        priors: Priors::default(),
        fingerprint: String::new(),
        layout: design.layout(),
        rj_acceptance: None,
        draws: vec![draw; n],
    }
}

fn nhhm_spec(len: usize) -> GenerativeSpec {
    GenerativeSpec {
        emissions: EmissionParams::new(vec![vec![-1.0, 0.5], vec![2.0, -0.3]], vec![3.0, 0.5]).unwrap(),
        transition: TransitionModel::multinomial(vec![
            vec![vec![1.0, 1.5], vec![0.0, 0.0]],
            vec![vec![-0.5, -1.0], vec![0.0, 0.0]],
        ])
        .unwrap(),
        covariate_roles: vec![Role::Both],
        ar_role: None,
        covariates: Covariates::Normal,
        len,
        seed: 41,
    }
}

#[test]
fn nhhm_predictive_matches_exact_mixture() {
    let gspec = nhhm_spec(20);
    let data = generate(&gspec).unwrap().data;
    let spec = ModelSpec::for_dataset("NHHM_2", &data).unwrap();
    let design = ModelDesign::build(&data, &spec).unwrap();
    let train = 6;
    let draw = Draw {
        emissions: gspec.emissions.clone(),
        transition: gspec.transition.clone(),
        path: StatePath::constant(train, 0),
        inclusion: None,
        loglik: 0.0,
    };
    let n = 100_000;
    let draws = fixed_draws(spec, &design, draw, n);
    let mut rng = SeededRng::seed_from_u64(1);
    let out = one_step_forecasts(&mut rng, &draws, &design, train, 1).unwrap();

    // Exact predictive: enumerate P(z_T | y_1..T), push through the
    // transition row at T, mix the two Normals.
    let h = design.head(train);
    let post = enumerate_posterior(&h.y, &h.x_mean, &h.x_trans, &gspec.emissions, &gspec.transition, &[0.5, 0.5]).unwrap();
    let last = &enumerate_marginals(&post, 2)[train - 1];
    let p = transition_matrix_at(&gspec.transition, design.x_trans.row(train - 1)).unwrap();
    let w: Vec<f64> = (0..2).map(|j| last[0] * p[0][j] + last[1] * p[1][j]).collect();
    let comps: Vec<Normal> = (0..2)
        .map(|s| Normal::new(gspec.emissions.mean(s, design.x_mean.row(train)), gspec.emissions.sigma2[s].sqrt()).unwrap())
        .collect();
    let cdf = |x: f64| w[0] * comps[0].cdf(x) + w[1] * comps[1].cdf(x);

    let mut x = out[0].draws.clone();
    crate::math::sort_floats(&mut x);
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 0.02, "KS distance {d}");
    assert_eq!(out[0].realized, data.y[train]);
}

#[test]
fn absorbing_chain_predicts_current_state() {
    let spec = GenerativeSpec::switching_means(&[0.0], &[1.0], vec![vec![1.0]], 30, 42).unwrap();
    let mut data = generate(&spec).unwrap().data;
    // Observations sit on state 2's mean with tiny noise.
    for (t, v) in data.y.iter_mut().enumerate() {
        *v = 5.0 + 0.001 * (t as f64).sin();
    }
    let ms = ModelSpec::msrw();
    let design = ModelDesign::build(&data, &ms).unwrap();
    let draw = Draw {
        emissions: EmissionParams::new(vec![vec![-5.0], vec![5.0]], vec![1.0, 0.01]).unwrap(),
        transition: TransitionModel::constant(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        path: StatePath::constant(25, 1),
        inclusion: None,
        loglik: 0.0,
    };
    let draws = fixed_draws(ms, &design, draw, 2000);
    let mut rng = SeededRng::seed_from_u64(2);
    let out = one_step_forecasts(&mut rng, &draws, &design, 25, 5).unwrap();
    for s in &out {
        assert!(s.draws.iter().all(|v| (v - 5.0).abs() < 0.6));
    }
}

#[test]
fn rw_predictive_centres_on_intercept() {
    let spec = GenerativeSpec::switching_means(&[0.7], &[2.0], vec![vec![1.0]], 130, 43).unwrap();
    let full = generate(&spec).unwrap().data;
    let train = full.head(100);
    let draws = fit(&train, &ModelSpec::rw(), &McmcConfig { iterations: 10_500, burn_in: 500, thin: 1, seed: 3 }).unwrap();
    let mut rng = SeededRng::seed_from_u64(3);
    let out = forecast_dataset(&mut rng, &draws, &full, 30).unwrap();
    assert_eq!(out.len(), 30);
    let post: f64 = draws.draws.iter().map(|d| d.emissions.coefs[0][0]).sum::<f64>() / draws.len() as f64;
    let sd = (2.0f64).sqrt() / (draws.len() as f64).sqrt();
    for s in &out {
        let m = crate::math::mean(&s.draws);
        assert!((m - post).abs() < 5.0 * sd, "horizon {}: {m} vs {post}", s.horizon);
    }
    assert_eq!(out[29].realized, full.y[129]);

    // Wrong training window.
    assert!(matches!(forecast_dataset(&mut rng, &draws, &full, 29), Err(Error::Fingerprint { .. })));
    assert!(matches!(forecast_dataset(&mut rng, &draws, &full, 200), Err(Error::MissingHorizon(_))));
    let design = ModelDesign::build(&full, &ModelSpec::rw()).unwrap();
    assert!(matches!(one_step_forecasts(&mut rng, &draws, &design, 100, 31), Err(Error::MissingHorizon(31))));
}

#[test]
fn forecasts_are_reproducible() {
    let full = generate(&nhhm_spec(90)).unwrap().data;
    let train = full.head(80);
    let spec = ModelSpec::for_dataset("NHHM_2", &train).unwrap();
    let draws = fit(&train, &spec, &McmcConfig { iterations: 400, burn_in: 200, thin: 2, seed: 4 }).unwrap();
    let run = |seed| forecast_dataset(&mut SeededRng::seed_from_u64(seed), &draws, &full, 10).unwrap();
    assert_eq!(run(9), run(9));
}

#[test]
fn state_summary_cases() {
    let p = StatePath::new(vec![0, 0, 1, 1], 2).unwrap();
    let s = state_summary(&[&p], &[1.0, 2.0, 3.0, 5.0], 2).unwrap();
    assert_eq!(s[0].occupancy, 0.5);
    assert_eq!(s[1].occupancy, 0.5);
    assert_eq!(s[0].mean, Some(1.5));
    assert_eq!(s[1].mean, Some(4.0));

    let mut rng = SeededRng::seed_from_u64(5);
    let y: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
    let one = StatePath::constant(50, 0);
    let s = state_summary(&[&one, &one], &y, 1).unwrap();
    assert_eq!(s[0].occupancy, 1.0);
    assert_eq!(s[0].mean, Some(crate::math::mean(&y)));
    assert_eq!(s[0].std, Some(crate::math::sample_variance(&y).sqrt()));

    let s = state_summary(&[&one], &y, 3).unwrap();
    assert_eq!(s[2].occupancy, 0.0);
    assert_eq!(s[2].mean, None);
    assert!(StateSummary::render_table(&s).lines().nth(3).unwrap().ends_with("-"));
}

#[test]
fn occupancies_sum_to_one() {
    let mut rng = SeededRng::seed_from_u64(6);
    let paths: Vec<StatePath> = (0..37)
        .map(|_| StatePath::new((0..101).map(|_| rng.random_range(0..4u8)).collect(), 4).unwrap())
        .collect();
    let refs: Vec<&StatePath> = paths.iter().collect();
    let y = vec![0.0; 101];
    let s = state_summary(&refs, &y, 4).unwrap();
    assert!((s.iter().map(|r| r.occupancy).sum::<f64>() - 1.0).abs() < 1e-12);
}

fn report(model: &str, crps: &[f64], mse: &[f64]) -> EvaluationReport {
    let samples: Vec<PredictiveSample> = crps
        .iter()
        .zip(mse)
        .enumerate()
        .map(|(i, (&c, _))| PredictiveSample {
            horizon: i + 1,
            draws: vec![0.0, 2.0 * c],
            realized: c,
        })
        .collect();
    let mut r = EvaluationReport::from_samples(model, &samples).unwrap();
    r.mse = mse.to_vec();
    r.avg_mse = crate::math::mean(mse);
    r
}

#[test]
fn report_averages_are_means() {
    let r = report("A", &[0.5, 1.0, 2.0], &[1.0, 2.0, 3.0]);
    assert!((r.avg_crps - (r.crps.iter().sum::<f64>() / 3.0)).abs() < 1e-12);
    assert_eq!(r.horizons, [1, 2, 3]);
}

#[test]
fn ranking_order_and_ties() {
    let a = report("B", &[1.0], &[2.0]);
    let b = report("A", &[1.0], &[2.0]);
    let c = report("C", &[1.0], &[1.0]);
    let d = report("D", &[0.5], &[9.0]);
    let r = compare_models(&[a, b, c, d]).unwrap();
    let names: Vec<&str> = r.reports.iter().map(|r| r.model.as_str()).collect();
    assert_eq!(names, ["D", "C", "A", "B"]);
    let single = compare_models(&[report("RW", &[1.0], &[1.0])]).unwrap();
    assert_eq!(single.reports.len(), 1);
    let text = single.render_text();
    assert_eq!(text.lines().next().unwrap().split_whitespace().collect::<Vec<_>>(), ["Model", "1", "Average"]);
    assert!(compare_models(&[report("X", &[1.0], &[1.0]), report("Y", &[1.0, 2.0], &[1.0, 1.0])]).is_err());
    assert!(compare_models(&[]).is_err());
}

#[test]
fn ranking_shows_spot_horizons() {
    let crps: Vec<f64> = (1..=30).map(|h| h as f64 / 10.0).collect();
    let r = compare_models(&[report("NHHM_4", &crps, &crps), report("RW", &crps, &crps)]).unwrap();
    let head: Vec<String> = r.render_text().lines().next().unwrap().split_whitespace().map(String::from).collect();
    assert_eq!(head, ["Model", "1", "2", "7", "15", "30", "Average"]);
    assert_eq!(spot_horizons(10), [1, 2, 7]);
}

#[test]
fn table_ordering_with_reported_averages() {
    let mut nhhm = report("NHHM_4", &[1.0], &[1.0]);
    nhhm.avg_crps = 1.78;
    nhhm.avg_mse = 28.00;
    let mut rw = report("RW", &[1.0], &[1.0]);
    rw.avg_crps = 1.98;
    rw.avg_mse = 31.12;
    let r = compare_models(&[rw, nhhm]).unwrap();
    assert_eq!(r.reports[0].model, "NHHM_4");
    assert!(r.render_text().contains("**1.78 (28.00)**"));
}

#[test]
fn replicated_bands_and_coverage() {
    let rep = vec![(0..=100).map(|i| i as f64).collect::<Vec<_>>(); 3];
    let b = replicated_bands(&rep, 0.05, 0.95).unwrap();
    assert_eq!(b[0], (5.0, 95.0));
    let c = coverage_report(&rep, &[4.0, 50.0, 96.0], 0.05, 0.95).unwrap();
    assert_eq!(c.to_string(), "0.66 (2/3)");
}
