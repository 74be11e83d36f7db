//! Forward simulation of regime-switching regressions with known truth.

use std::path::Path;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::data::{AlignedDataset, Manifest, RawSeries, Role, SeriesEntry, TransformKind, AR_COLUMN, INTERCEPT};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::hmm::{transition_matrix_at, uniform_init, EmissionParams, StatePath, TransitionModel};
use crate::SeededRng;

/// Where the covariates come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Covariates {
    /// iid standard Normal columns.
    Normal,
    /// `T x k` user-supplied values.
    Given(Design),
}

/// Ground truth for a simulated dataset.
///
/// The dataset has an intercept, covariates `X1..Xk` with the given roles
/// and optionally an AR(1) column. Emission coefficients run over the
/// intercept and the mean-equation columns in that order, transition
/// coefficients over the intercept and the transition columns.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerativeSpec {
    pub emissions: EmissionParams,
    pub transition: TransitionModel,
    pub covariate_roles: Vec<Role>,
    /// Role of the AR(1) column, if the dataset carries one.
    pub ar_role: Option<Role>,
    pub covariates: Covariates,
    pub len: usize,
    pub seed: u64,
}

pub fn covariate_name(j: usize) -> String {
    format!("X{}", j + 1)
}

fn start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date")
}

impl GenerativeSpec {
    /// Constant-transition model with intercept-only emissions.
    pub fn switching_means(means: &[f64], sigma2: &[f64], matrix: Vec<Vec<f64>>, len: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            emissions: EmissionParams::new(means.iter().map(|&m| vec![m]).collect(), sigma2.to_vec())?,
            transition: TransitionModel::constant(matrix)?,
            covariate_roles: Vec::new(),
            ar_role: None,
            covariates: Covariates::Normal,
            len,
            seed,
        })
    }

    fn names_and_roles(&self) -> (Vec<String>, Vec<Role>) {
        let mut names = vec![INTERCEPT.to_string()];
        let mut roles = vec![Role::Both];
        for (j, &r) in self.covariate_roles.iter().enumerate() {
            names.push(covariate_name(j));
            roles.push(r);
        }
        if let Some(r) = self.ar_role {
            names.push(AR_COLUMN.to_string());
            roles.push(r);
        }
        (names, roles)
    }

    fn columns(roles: &[Role], keep: fn(Role) -> bool) -> Vec<usize> {
        std::iter::once(0).chain((1..roles.len()).filter(|&j| keep(roles[j]))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.len < 10 {
            return Err(Error::Invalid(format!("series length {} below 10", self.len)));
        }
        let (_, roles) = self.names_and_roles();
        let km = Self::columns(&roles, Role::in_mean).len();
        let kt = Self::columns(&roles, Role::in_transition).len();
        if self.emissions.n_coefs() != km {
            return Err(Error::Dimension(format!("{} emission coefficients for {km} mean columns", self.emissions.n_coefs())));
        }
        if self.transition.states() != self.emissions.states() {
            return Err(Error::Dimension("emission and transition state counts differ".into()));
        }
        if let TransitionModel::Multinomial { coefs } = &self.transition {
            if coefs[0][0].len() != kt {
                return Err(Error::Dimension(format!("{} transition coefficients for {kt} columns", coefs[0][0].len())));
            }
        }
        if let Covariates::Given(d) = &self.covariates {
            if d.nrows() != self.len || d.ncols() != self.covariate_roles.len() {
                return Err(Error::Dimension("covariate matrix does not match".into()));
            }
        }
        Ok(())
    }
}

/// Output of [`generate`]: the dataset, the true path and the target value
/// preceding the first row (the AR(1) entry of row 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub data: AlignedDataset,
    pub path: StatePath,
    pub y_initial: f64,
}

fn draw_state<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> u8 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return j as u8;
        }
    }
    (probs.len() - 1) as u8
}

pub fn generate(spec: &GenerativeSpec) -> Result<Generated> {
    spec.validate()?;
    let mut rng = SeededRng::seed_from_u64(spec.seed);
    let n = spec.len;
    let k = spec.covariate_roles.len();
    let (names, roles) = spec.names_and_roles();
    let mean_cols = GenerativeSpec::columns(&roles, Role::in_mean);
    let trans_cols = GenerativeSpec::columns(&roles, Role::in_transition);
    let m = spec.emissions.states();

    let mut rows = vec![vec![0.0; names.len()]; n];
    for (t, row) in rows.iter_mut().enumerate() {
        row[0] = 1.0;
        for j in 0..k {
            row[1 + j] = match &spec.covariates {
                Covariates::Normal => rng.sample(StandardNormal),
                Covariates::Given(d) => d.get(t, j),
            };
        }
    }

    let y_initial = if spec.ar_role.is_some() { rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
    let mut y = vec![0.0; n];
    let mut z = vec![0u8; n];
    z[0] = draw_state(&mut rng, &uniform_init(m));
    let pick = |row: &[f64], cols: &[usize]| cols.iter().map(|&c| row[c]).collect::<Vec<f64>>();
    for t in 0..n {
        if spec.ar_role.is_some() {
            rows[t][k + 1] = if t == 0 { y_initial } else { y[t - 1] };
        }
        if t > 0 {
            let p = transition_matrix_at(&spec.transition, &pick(&rows[t - 1], &trans_cols))?;
            z[t] = draw_state(&mut rng, &p[z[t - 1] as usize]);
        }
        let s = z[t] as usize;
        let mu = spec.emissions.mean(s, &pick(&rows[t], &mean_cols));
        y[t] = mu + spec.emissions.sigma2[s].sqrt() * rng.sample::<f64, _>(StandardNormal);
    }
    let dates = (0..n).map(|t| start_date() + Days::new(t as u64 + 1)).collect();
    let data = AlignedDataset::new(y, Design::from_rows(&rows)?, names, roles, dates)?;
    Ok(Generated {
        data,
        path: StatePath::new(z, m)?,
        y_initial,
    })
}

impl Generated {
    /// Write the target and covariates as identity-transformed CSVs plus a
    /// manifest that reassembles exactly this dataset. Returns the
    /// manifest path.
    pub fn write_bundle(&self, dir: &Path, target: &str) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let d = &self.data;
        let mut dates = vec![start_date()];
        dates.extend(d.dates.iter().copied());
        let mut values = vec![self.y_initial];
        values.extend(d.y.iter().copied());
        let target_file = format!("{}.csv", target.to_lowercase());
        RawSeries::new(target, dates, values)?.write_csv(&dir.join(&target_file))?;
        let mut series = vec![SeriesEntry {
            name: target.to_string(),
            file: target_file.into(),
            transform: Some(TransformKind::Identity),
            role: Some(Role::Target),
        }];
        let ar = d.ar_column();
        for j in 1..d.names.len() {
            if Some(j) == ar {
                continue;
            }
            let file = format!("{}.csv", d.names[j].to_lowercase());
            RawSeries::new(d.names[j].clone(), d.dates.clone(), d.x.column(j))?.write_csv(&dir.join(&file))?;
            series.push(SeriesEntry {
                name: d.names[j].clone(),
                file: file.into(),
                transform: Some(TransformKind::Identity),
                role: Some(d.roles[j]),
            });
        }
        let manifest = Manifest {
            ar_lag: ar.is_some() as usize,
            series,
            base_dir: dir.to_path_buf(),
        };
        let path = dir.join("manifest.toml");
        std::fs::write(&path, manifest.to_toml()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
