use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{assemble, AlignedDataset, AssembleOptions, PredictorInput, RawSeries, Role, TransformKind};
use crate::error::{Error, Result};

/// Maps data files to transforms and roles.
///
/// ```toml
/// ar_lag = 1
///
/// [[series]]
/// name = "BTC"
/// file = "btc.csv"
/// role = "target"
/// transform = "pct_log_return"
///
/// [[series]]
/// name = "VIX"
/// file = "vix.csv"
/// transform = "log_level"
/// role = "both"          # predictor | transition-only | both (default)
/// ```
///
/// Relative file paths resolve against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default = "default_ar_lag")]
    pub ar_lag: usize,
    pub series: Vec<SeriesEntry>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesEntry {
    pub name: String,
    pub file: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
}

fn default_ar_lag() -> usize {
    1
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m: Manifest = toml::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        m.validate().map_err(|e| Error::parse(path, e.to_string()))?;
        Ok(m)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serialises")
    }

    fn validate(&self) -> Result<()> {
        let targets = self
            .series
            .iter()
            .filter(|s| s.role == Some(Role::Target))
            .count();
        if targets != 1 {
            return Err(Error::Invalid(format!("expected exactly one target series, found {targets}")));
        }
        if let Some(s) = self
            .series
            .iter()
            .find(|s| s.role != Some(Role::Target) && s.transform.is_none())
        {
            return Err(Error::Invalid(format!("predictor `{}` has no transform", s.name)));
        }
        Ok(())
    }

    fn resolve(&self, file: &Path) -> PathBuf {
        if file.is_absolute() {
            file.to_path_buf()
        } else {
            self.base_dir.join(file)
        }
    }

    /// Read every file and assemble the dataset, holding out the last
    /// `holdout` rows from normalisation statistics.
    pub fn assemble(&self, holdout: usize) -> Result<AlignedDataset> {
        self.validate()?;
        let mut target = None;
        let mut predictors = Vec::new();
        for entry in &self.series {
            let series = RawSeries::read_csv(&self.resolve(&entry.file), entry.name.clone())?;
            match entry.role {
                Some(Role::Target) => {
                    target = Some((series, entry.transform.unwrap_or(TransformKind::PctLogReturn)))
                }
                role => predictors.push(PredictorInput {
                    series,
                    transform: entry.transform.expect("validated"),
                    role: role.unwrap_or(Role::Both),
                }),
            }
        }
        let (target, target_transform) = target.expect("validated");
        assemble(
            &target,
            &predictors,
            AssembleOptions {
                ar_lag: self.ar_lag,
                target_transform,
                holdout,
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_defaults() {
        let m: Manifest = toml::from_str(
            r#"
            [[series]]
            name = "BTC"
            file = "btc.csv"
            role = "target"

            [[series]]
            name = "VIX"
            file = "vix.csv"
            transform = "log_level"

            [[series]]
            name = "Hash"
            file = "hash.csv"
            transform = "pct_change"
            role = "transition-only"
            "#,
        )
        .unwrap();
        assert_eq!(m.ar_lag, 1);
        assert!(m.validate().is_ok());
        assert_eq!(m.series[1].role, None);
        assert_eq!(m.series[2].role, Some(Role::TransitionOnly));
    }

    #[test]
    fn requires_single_target_and_transforms() {
        let none: Manifest = toml::from_str(
            "[[series]]\nname='a'\nfile='a.csv'\ntransform='identity'\n",
        )
        .unwrap();
        assert!(none.validate().is_err());
        let untransformed: Manifest = toml::from_str(
            "[[series]]\nname='a'\nfile='a.csv'\nrole='target'\n[[series]]\nname='b'\nfile='b.csv'\n",
        )
        .unwrap();
        assert!(untransformed.validate().is_err());
    }
}
