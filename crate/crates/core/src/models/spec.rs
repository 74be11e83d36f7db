use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{AlignedDataset, AR_COLUMN, INTERCEPT};
use crate::error::{Error, Result};
use crate::math::sample_variance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "NHHM")]
    Nhhm,
    #[serde(rename = "HHM")]
    Hhm,
    #[serde(rename = "MS-RW")]
    MsRw,
    #[serde(rename = "RW")]
    Rw,
    #[serde(rename = "AR")]
    Ar,
    #[serde(rename = "KS")]
    Ks,
}

impl Family {
    pub fn is_switching(self) -> bool {
        matches!(self, Family::Nhhm | Family::Hhm | Family::MsRw)
    }
}

/// A model from the roster: family, number of states and predictor lists.
///
/// Rosters hold column names of the dataset without the intercept, which
/// every equation carries. `ar_order` adds lags of the target to the mean
/// equation; the AR(1) column may also appear in the transition roster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub states: usize,
    pub ar_order: usize,
    pub mean_predictors: Vec<String>,
    pub transition_predictors: Vec<String>,
    pub rj_enabled: bool,
}

impl ModelSpec {
    pub fn rw() -> Self {
        Self::bare(Family::Rw, 1, 0)
    }

    pub fn msrw() -> Self {
        Self::bare(Family::MsRw, 2, 0)
    }

    pub fn ar(order: usize) -> Result<Self> {
        let s = Self::bare(Family::Ar, 1, order);
        s.validate()?;
        Ok(s)
    }

    fn bare(family: Family, states: usize, ar_order: usize) -> Self {
        Self {
            family,
            states,
            ar_order,
            mean_predictors: Vec::new(),
            transition_predictors: Vec::new(),
            rj_enabled: false,
        }
    }

    /// Spec for an abbreviation (`NHHM_3`, `HHM_2`, `MS-RW`, `KS`, `AR5`,
    /// `RW`, optionally `NHHM_m_RJ`) with rosters taken from the roles of
    /// the dataset columns.
    pub fn for_dataset(abbreviation: &str, data: &AlignedDataset) -> Result<Self> {
        let mut spec: ModelSpec = abbreviation.parse()?;
        let has_ar = data.ar_column().is_some();
        let pick = |keep: fn(crate::data::Role) -> bool| -> Vec<String> {
            (1..data.names.len())
                .filter(|&j| keep(data.roles[j]) && data.names[j] != AR_COLUMN)
                .map(|j| data.names[j].clone())
                .collect()
        };
        match spec.family {
            Family::Nhhm => {
                spec.mean_predictors = pick(crate::data::Role::in_mean);
                spec.transition_predictors = pick(crate::data::Role::in_transition);
                spec.ar_order = has_ar as usize;
                if has_ar {
                    spec.transition_predictors.push(AR_COLUMN.to_string());
                }
            }
            Family::Hhm | Family::Ks => {
                spec.mean_predictors = pick(crate::data::Role::in_mean);
                spec.ar_order = has_ar as usize;
            }
            _ => {}
        }
        spec.validate()?;
        spec.validate_against(data)?;
        Ok(spec)
    }

    pub fn abbreviation(&self) -> String {
        match self.family {
            Family::Nhhm if self.rj_enabled => format!("NHHM_{}_RJ", self.states),
            Family::Nhhm => format!("NHHM_{}", self.states),
            Family::Hhm => format!("HHM_{}", self.states),
            Family::MsRw => "MS-RW".into(),
            Family::Rw => "RW".into(),
            Family::Ar => format!("AR{}", self.ar_order),
            Family::Ks => "KS".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invalid(format!("{}: {msg}", self.abbreviation())));
        let m = self.states;
        match self.family {
            Family::Nhhm | Family::Hhm if !(2..=5).contains(&m) => return bad(format!("{m} states, need 2 to 5")),
            Family::MsRw if m != 2 => return bad("MS-RW has exactly 2 states".into()),
            Family::Rw | Family::Ar | Family::Ks if m != 1 => return bad("single-regime model".into()),
            _ => {}
        }
        match self.family {
            Family::Ar if !(1..=5).contains(&self.ar_order) => return bad("AR order must be 1 to 5".into()),
            Family::Nhhm | Family::Hhm | Family::Ks if self.ar_order > 1 => return bad("AR order must be 0 or 1".into()),
            Family::Rw | Family::MsRw if self.ar_order != 0 => return bad("no autoregressive term allowed".into()),
            _ => {}
        }
        if matches!(self.family, Family::Rw | Family::MsRw | Family::Ar) && !self.mean_predictors.is_empty() {
            return bad("no mean-equation predictors allowed".into());
        }
        if self.family != Family::Nhhm && !self.transition_predictors.is_empty() {
            return bad("only NHHM has transition predictors".into());
        }
        if self.rj_enabled && self.family != Family::Nhhm {
            return bad("variable search needs NHHM".into());
        }
        let named = self.mean_predictors.iter().chain(&self.transition_predictors);
        if let Some(n) = named.clone().find(|n| n.as_str() == INTERCEPT) {
            return bad(format!("`{n}` is implicit"));
        }
        if self.mean_predictors.iter().any(|n| n == AR_COLUMN) {
            return bad("use ar_order for autoregressive terms".into());
        }
        Ok(())
    }

    /// Every named column must exist in the dataset.
    pub fn validate_against(&self, data: &AlignedDataset) -> Result<()> {
        for n in self.mean_predictors.iter().chain(&self.transition_predictors) {
            if data.column_index(n).is_none() {
                return Err(Error::Dimension(format!("{}: no column `{n}`", self.abbreviation())));
            }
        }
        if self.ar_order > 0 && data.ar_column().is_none() {
            return Err(Error::Dimension(format!("{}: dataset has no AR column", self.abbreviation())));
        }
        Ok(())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown model `{s}`"));
        let spec = match s {
            "RW" => Self::rw(),
            "MS-RW" => Self::msrw(),
            "KS" => Self::bare(Family::Ks, 1, 0),
            _ if s.starts_with("AR") => Self::bare(Family::Ar, 1, s[2..].parse().map_err(|_| bad())?),
            _ => {
                let mut parts = s.split('_');
                let family = match parts.next() {
                    Some("NHHM") => Family::Nhhm,
                    Some("HHM") => Family::Hhm,
                    _ => return Err(bad()),
                };
                let m = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
                let mut spec = Self::bare(family, m, 0);
                match parts.next() {
                    None => {}
                    Some("RJ") if family == Family::Nhhm && parts.next().is_none() => spec.rj_enabled = true,
                    _ => return Err(bad()),
                }
                spec
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.abbreviation())
    }
}

/// The twelve-model roster.
pub const STANDARD_ROSTER: [&str; 12] = [
    "NHHM_2", "NHHM_3", "NHHM_4", "NHHM_5", "HHM_2", "HHM_3", "HHM_4", "HHM_5", "MS-RW", "KS", "AR5", "RW",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McmcConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            iterations: 20_000,
            burn_in: 10_000,
            thin: 5,
            seed: 0,
        }
    }
}

impl McmcConfig {
    pub const MIN_DRAWS: usize = 100;

    pub fn retained(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 || self.burn_in >= self.iterations {
            return Err(Error::Invalid(format!(
                "need burn_in < iterations and thin >= 1, got {}/{}/{}",
                self.iterations, self.burn_in, self.thin
            )));
        }
        if self.retained() < Self::MIN_DRAWS {
            return Err(Error::Invalid(format!(
                "{} retained draws, need at least {}",
                self.retained(),
                Self::MIN_DRAWS
            )));
        }
        Ok(())
    }

    /// Whether zero-based iteration `it` is stored.
    pub fn keeps(&self, it: usize) -> bool {
        it >= self.burn_in && (it + 1 - self.burn_in) % self.thin == 0
    }
}

/// Prior hyperparameters.
///
/// Regression coefficients `N(0, coef_var I)`, state variances
/// `InvGamma(sigma_shape, sigma_scale)` with the scale defaulting to the
/// sample variance of the target, transition coefficients
/// `N(0, transition_var I)`, and `Dirichlet(dirichlet_alpha)` rows for
/// constant matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Priors {
    pub coef_var: f64,
    pub sigma_shape: f64,
    pub sigma_scale: Option<f64>,
    pub transition_var: f64,
    pub inclusion: f64,
    pub dirichlet_alpha: f64,
}

impl Default for Priors {
    fn default() -> Self {
        Self {
            coef_var: 100.0,
            sigma_shape: 2.0,
            sigma_scale: None,
            transition_var: 10.0,
            inclusion: 0.5,
            dirichlet_alpha: 1.0,
        }
    }
}

impl Priors {
    pub fn validate(&self) -> Result<()> {
        let pos = [self.coef_var, self.sigma_shape, self.transition_var, self.dirichlet_alpha];
        if pos.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.sigma_scale.is_some_and(|s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::Invalid("prior scales must be positive and finite".into()));
        }
        if !(0.0..=1.0).contains(&self.inclusion) {
            return Err(Error::Invalid(format!("inclusion probability {}", self.inclusion)));
        }
        Ok(())
    }

    pub(crate) fn resolved_scale(&self, y: &[f64]) -> f64 {
        self.sigma_scale.unwrap_or_else(|| {
            let v = sample_variance(y);
            if v.is_finite() && v > 0.0 {
                v
            } else {
                1.0
            }
        })
    }
}
