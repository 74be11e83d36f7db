use std::path::{Path, PathBuf};

use rand::SeedableRng;
use regimes_core::data::Manifest;
use regimes_core::forecast::{
    compare_models, coverage_report, forecast_dataset, path_frequencies, replicated_bands, state_summary,
    EvaluationReport, StateSummary,
};
use regimes_core::models::{fit_with_priors, posterior_summary, replicate_insample, ModelDesign};
use regimes_core::{AlignedDataset, ModelSpec, PosteriorDraws, SeededRng};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv_bytes, write_atomic};

/// Band used for the in-sample coverage check.
pub const BAND: (f64, f64) = (0.005, 0.995);

/// Per-model, per-stage seed so results do not depend on roster order or
/// thread scheduling.
pub fn derive_seed(base: u64, stage: &str, model: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    h.update(stage.as_bytes());
    h.update([0]);
    h.update(model.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

pub struct Workspace {
    pub cfg: RunConfig,
    pub full: AlignedDataset,
    pub train: AlignedDataset,
    pub specs: Vec<ModelSpec>,
}

impl Workspace {
    pub fn open(cfg: RunConfig) -> Result<Self, CliError> {
        let manifest = Manifest::load(&cfg.manifest)?;
        let full = manifest.assemble(cfg.horizons)?;
        if full.len() <= cfg.horizons + 1 {
            return Err(CliError::data(format!(
                "{} rows leave no training window for {} horizons",
                full.len(),
                cfg.horizons
            )));
        }
        let train = full.head(full.len() - cfg.horizons);
        let specs = cfg
            .models
            .iter()
            .map(|m| ModelSpec::for_dataset(m, &train).map_err(|e| CliError::from(e).context(m)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            cfg,
            full,
            train,
            specs,
        })
    }

    fn dir(&self, sub: &str) -> PathBuf {
        self.cfg.out.join(sub)
    }

    pub fn draws_path(&self, model: &str) -> PathBuf {
        self.dir("draws").join(format!("{model}.jsonl"))
    }

    fn load_draws(&self, spec: &ModelSpec) -> Result<PosteriorDraws, CliError> {
        let name = spec.abbreviation();
        let draws = PosteriorDraws::load(&self.draws_path(&name)).map_err(|e| CliError::from(e).context(&name))?;
        draws
            .check_fingerprint(&self.train.fingerprint())
            .map_err(|e| CliError::from(e).context(&name))?;
        if draws.spec != *spec {
            return Err(CliError::data(format!("{name}: draw file holds a different model specification")));
        }
        Ok(draws)
    }

    /// Run `job` for every roster model on its own thread; results come
    /// back in roster order.
    fn per_model<T: Send>(
        &self,
        job: impl Fn(&ModelSpec) -> Result<T, CliError> + Sync,
    ) -> Vec<Result<T, CliError>> {
        std::thread::scope(|s| {
            let handles: Vec<_> = self.specs.iter().map(|spec| s.spawn(|| job(spec))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(CliError::new(crate::error::code::OTHER, "worker panicked"))))
                .collect()
        })
    }
}

fn first_error<T>(results: Vec<Result<T, CliError>>) -> Result<Vec<T>, CliError> {
    results.into_iter().collect()
}

pub fn cmd_fit(ws: &Workspace) -> Result<Vec<String>, CliError> {
    let results = ws.per_model(|spec| {
        let name = spec.abbreviation();
        let mut mcmc = ws.cfg.mcmc;
        mcmc.seed = derive_seed(ws.cfg.mcmc.seed, "fit", &name);
        let draws = fit_with_priors(&ws.train, spec, &mcmc, &ws.cfg.priors).map_err(|e| CliError::from(e).context(&name))?;
        write_atomic(&ws.draws_path(&name), &draws.to_bytes())?;
        let fit_dir = ws.dir("fit");
        write_atomic(&fit_dir.join(format!("{name}_trace.csv")), draws.trace_csv()?.as_bytes())?;
        let summary = posterior_summary(&draws)?;
        write_atomic(&fit_dir.join(format!("{name}_summary.txt")), summary.render_text().as_bytes())?;
        write_atomic(&fit_dir.join(format!("{name}_summary.csv")), summary.to_csv()?.as_bytes())?;
        let rj = draws
            .rj_acceptance
            .map(|a| format!(", variable-search acceptance {a:.3}"))
            .unwrap_or_default();
        Ok(format!("{name}: {} draws{rj}", draws.len()))
    });
    first_error(results)
}

pub fn cmd_forecast(ws: &Workspace) -> Result<String, CliError> {
    let results = ws.per_model(|spec| {
        let name = spec.abbreviation();
        let draws = ws.load_draws(spec)?;
        let mut rng = SeededRng::seed_from_u64(derive_seed(ws.cfg.mcmc.seed, "forecast", &name));
        let samples = forecast_dataset(&mut rng, &draws, &ws.full, ws.cfg.horizons).map_err(|e| CliError::from(e).context(&name))?;
        let report = EvaluationReport::from_samples(&name, &samples)?;
        let json = serde_json::to_vec_pretty(&report).map_err(|e| CliError::output(e.to_string()))?;
        write_atomic(&ws.dir("forecast").join(format!("{name}.json")), &json)?;
        Ok(report)
    });
    let reports = first_error(results)?;
    let ranking = compare_models(&reports)?;
    let dir = ws.dir("forecast");
    let text = ranking.render_text();
    write_atomic(&dir.join("ranking.txt"), text.as_bytes())?;
    write_atomic(&dir.join("ranking.csv"), ranking.to_wide_csv()?.as_bytes())?;
    write_atomic(&dir.join("scores.csv"), ranking.to_long_csv()?.as_bytes())?;
    Ok(text)
}

struct ModelReport {
    name: String,
    coverage: String,
    outliers: usize,
    total: usize,
    mse: f64,
    states: Vec<StateSummary>,
}

fn write_model_report(ws: &Workspace, spec: &ModelSpec) -> Result<ModelReport, CliError> {
    let name = spec.abbreviation();
    let draws = ws.load_draws(spec)?;
    let design = ModelDesign::build(&ws.train, spec)?;
    let dates: Vec<String> = ws.train.dates[design.first_row..].iter().map(|d| d.format("%Y-%m-%d").to_string()).collect();
    let y = &design.y;
    let dir = ws.dir("report");

    let mut rng = SeededRng::seed_from_u64(derive_seed(ws.cfg.mcmc.seed, "report", &name));
    let rep = replicate_insample(&mut rng, &draws, &design)?;
    let coverage = coverage_report(&rep, y, BAND.0, BAND.1)?;
    let bands = replicated_bands(&rep, BAND.0, BAND.1)?;
    let n = draws.len() as f64;
    let mse = rep
        .iter()
        .zip(y)
        .map(|(row, v)| row.iter().map(|r| (r - v).powi(2)).sum::<f64>() / n)
        .sum::<f64>()
        / y.len() as f64;
    let rows = (0..y.len()).map(|t| [dates[t].clone(), y[t].to_string(), bands[t].0.to_string(), bands[t].1.to_string()]);
    write_atomic(&dir.join(format!("{name}_bands.csv")), &csv_bytes(&["date", "value", "lower", "upper"], rows)?)?;

    let m = draws.states();
    let paths = draws.paths();
    let freq = path_frequencies(&paths, m)?;
    let map: Vec<usize> = freq
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (s, &p)| if p > best.1 { (s, p) } else { best })
                .0
                + 1
        })
        .collect();
    let mut head = vec!["date".to_string(), "value".into(), "state".into()];
    head.extend((1..=m).map(|s| format!("prob_{s}")));
    let head_refs: Vec<&str> = head.iter().map(String::as_str).collect();
    let rows = (0..y.len()).map(|t| {
        let mut r = vec![dates[t].clone(), y[t].to_string(), map[t].to_string()];
        r.extend(freq[t].iter().map(f64::to_string));
        r
    });
    write_atomic(&dir.join(format!("{name}_smoothed.csv")), &csv_bytes(&head_refs, rows)?)?;
    let rows = (0..y.len()).map(|t| [dates[t].clone(), y[t].to_string(), map[t].to_string()]);
    write_atomic(&dir.join(format!("{name}_states.csv")), &csv_bytes(&["date", "value", "state"], rows)?)?;

    let states = state_summary(&paths, y, m)?;
    write_atomic(&dir.join(format!("{name}_state_summary.txt")), StateSummary::render_table(&states).as_bytes())?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let rows = states.iter().map(|s| [s.state.to_string(), s.occupancy.to_string(), s.count.to_string(), opt(s.mean), opt(s.std)]);
    write_atomic(
        &dir.join(format!("{name}_state_summary.csv")),
        &csv_bytes(&["state", "occupancy", "count", "mean", "std"], rows)?,
    )?;
    Ok(ModelReport {
        name,
        coverage: coverage.to_string(),
        outliers: coverage.outliers,
        total: coverage.total,
        mse,
        states,
    })
}

pub fn cmd_report(ws: &Workspace) -> Result<String, CliError> {
    let reports = first_error(ws.per_model(|spec| write_model_report(ws, spec)))?;
    let dir = ws.dir("report");
    let mut table = vec![vec!["Model".to_string(), "Proportion".into(), "MSE".into()]];
    table.extend(reports.iter().map(|r| vec![r.name.clone(), r.coverage.clone(), format!("{:.2}", r.mse)]));
    let text = regimes_core::models::align(&table);
    write_atomic(&dir.join("coverage.txt"), text.as_bytes())?;
    let rows = reports
        .iter()
        .map(|r| [r.name.clone(), r.outliers.to_string(), r.total.to_string(), r.coverage.clone(), r.mse.to_string()]);
    write_atomic(&dir.join("coverage.csv"), &csv_bytes(&["model", "outliers", "total", "proportion", "mse"], rows)?)?;
    let mut states = String::new();
    for r in &reports {
        states.push_str(&format!("{}\n{}\n", r.name, StateSummary::render_table(&r.states)));
    }
    write_atomic(&dir.join("states.txt"), states.as_bytes())?;
    Ok(text)
}

/// Canned generative setups for `simulate`.
pub fn simulate(out: &Path, kind: &str, len: usize, seed: u64) -> Result<PathBuf, CliError> {
    use regimes_core::data::Role;
    use regimes_core::synthetic::{generate, Covariates, GenerativeSpec};
    use regimes_core::{EmissionParams, TransitionModel};

    let emissions = EmissionParams::new(vec![vec![-0.5, 0.8, 0.1], vec![0.4, 0.2, -0.05]], vec![9.0, 1.0])?;
    let transition = match kind {
        "nhhm" => TransitionModel::multinomial(vec![
            vec![vec![1.5, 0.0, 2.0, 0.0], vec![0.0; 4]],
            vec![vec![-2.0, 0.0, 1.5, 0.0], vec![0.0; 4]],
        ])?,
        "hhm" => TransitionModel::constant(vec![vec![0.9, 0.1], vec![0.1, 0.9]])?,
        other => return Err(CliError::new(crate::error::code::USAGE, format!("unknown kind `{other}` (nhhm, hhm)"))),
    };
    let spec = GenerativeSpec {
        emissions,
        transition,
        covariate_roles: vec![Role::Both, Role::TransitionOnly],
        ar_role: Some(Role::Both),
        covariates: Covariates::Normal,
        len,
        seed,
    };
    let g = generate(&spec)?;
    let manifest = g.write_bundle(out, "SYN")?;
    let truth = serde_json::json!({
        "kind": kind,
        "seed": seed,
        "emissions": spec.emissions,
        "transition": spec.transition,
        "path": g.path,
    });
    let truth = serde_json::to_vec_pretty(&truth).map_err(|e| CliError::output(e.to_string()))?;
    write_atomic(&out.join("truth.json"), &truth)?;
    Ok(manifest)
}
