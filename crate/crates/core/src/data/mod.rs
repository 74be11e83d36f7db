//! Raw series ingestion, calendar alignment and design-matrix assembly.
//!
//! Every input CSV has a header row, an ISO-8601 date in the first column and
//! a real value in the second. Predictors are forward-filled onto the target
//! calendar, so a row at date `d` only ever sees predictor observations dated
//! on or before `d`.

mod manifest;
mod transform;

use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::design::Design;
use crate::error::{Error, Result};

pub use manifest::{Manifest, SeriesEntry};
pub use transform::{
    log_levels, log_returns, normalize, pct_change, pct_log_returns, NormalizeStats, TransformKind,
};

pub const INTERCEPT: &str = "Intercept";
pub const AR_COLUMN: &str = "AR(1)";

/// Which equations a column enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Target,
    /// Mean equation only.
    Predictor,
    TransitionOnly,
    Both,
}

impl Role {
    pub fn in_mean(self) -> bool {
        matches!(self, Role::Predictor | Role::Both)
    }

    pub fn in_transition(self) -> bool {
        matches!(self, Role::TransitionOnly | Role::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl RawSeries {
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if dates.len() != values.len() {
            return Err(Error::Dimension(format!(
                "series `{name}` has {} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        for (i, w) in dates.windows(2).enumerate() {
            if w[1] == w[0] {
                return Err(Error::Calendar {
                    name,
                    message: format!("duplicated date {} at row {}", w[1], i + 1),
                });
            }
            if w[1] < w[0] {
                return Err(Error::Calendar {
                    name,
                    message: format!("dates not increasing at row {} ({})", i + 1, w[1]),
                });
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("series `{name}` row {i}")));
        }
        Ok(Self {
            name,
            dates,
            values,
        })
    }

    pub fn read_csv(path: &Path, name: impl Into<String>) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let mut dates = Vec::new();
        let mut values = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::parse(path, e.to_string()))?;
            let row = i + 2;
            let date = record
                .get(0)
                .ok_or_else(|| Error::parse(path, format!("line {row}: missing date")))?;
            let value = record
                .get(1)
                .ok_or_else(|| Error::parse(path, format!("line {row}: missing value")))?;
            let date = NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d")
                .map_err(|e| Error::parse(path, format!("line {row}: bad date `{date}`: {e}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, format!("line {row}: bad value `{value}`")))?;
            dates.push(date);
            values.push(value);
        }
        Self::new(name, dates, values)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("date,value\n");
        for (d, v) in self.dates.iter().zip(&self.values) {
            out.push_str(&format!("{},{v:?}\n", d.format("%Y-%m-%d")));
        }
        File::create(path)
            .and_then(|mut f| f.write_all(out.as_bytes()))
            .map_err(|e| Error::io(path, e))
    }

    fn transformed(&self, kind: TransformKind, norm_cutoff: Option<NaiveDate>) -> Result<Self> {
        let with_name = |e: Error| match e {
            Error::ZeroVariance(_) => Error::ZeroVariance(self.name.clone()),
            other => other,
        };
        let (dates, values) = match kind {
            TransformKind::Identity => (self.dates.clone(), self.values.clone()),
            TransformKind::LogLevel => (self.dates.clone(), log_levels(&self.values)?),
            TransformKind::PctLogReturn => (self.dates[1..].to_vec(), pct_log_returns(&self.values)?),
            TransformKind::LogReturn => (self.dates[1..].to_vec(), log_returns(&self.values)?),
            TransformKind::PctChange => (self.dates[1..].to_vec(), pct_change(&self.values)?),
            TransformKind::Normalize => {
                let n_ref = match norm_cutoff {
                    Some(cut) => self.dates.partition_point(|d| *d <= cut),
                    None => self.values.len(),
                };
                let stats = NormalizeStats::fit(&self.values[..n_ref]).map_err(with_name)?;
                (self.dates.clone(), stats.apply(&self.values))
            }
        };
        Ok(Self {
            name: self.name.clone(),
            dates,
            values,
        })
    }
}

/// One predictor series together with its transform and role.
#[derive(Debug, Clone)]
pub struct PredictorInput {
    pub series: RawSeries,
    pub transform: TransformKind,
    pub role: Role,
}

#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    /// 0 or 1: whether to append the `y[t-1]` column.
    pub ar_lag: usize,
    pub target_transform: TransformKind,
    /// Trailing rows excluded from normalisation statistics.
    pub holdout: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self {
            ar_lag: 1,
            target_transform: TransformKind::PctLogReturn,
            holdout: 0,
        }
    }
}

/// Target vector aligned with its regression design.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedDataset {
    pub y: Vec<f64>,
    /// `T x (k+1)`, column 0 is the intercept.
    pub x: Design,
    pub names: Vec<String>,
    pub roles: Vec<Role>,
    pub dates: Vec<NaiveDate>,
}

impl AlignedDataset {
    pub fn new(
        y: Vec<f64>,
        x: Design,
        names: Vec<String>,
        roles: Vec<Role>,
        dates: Vec<NaiveDate>,
    ) -> Result<Self> {
        let t = y.len();
        let k1 = x.ncols();
        if x.nrows() != t || dates.len() != t || names.len() != k1 || roles.len() != k1 {
            return Err(Error::Dimension(format!(
                "dataset parts disagree: y {t}, x {}x{k1}, dates {}, names {}, roles {}",
                x.nrows(),
                dates.len(),
                names.len(),
                roles.len()
            )));
        }
        if k1 == 0 || (0..t).any(|r| x.get(r, 0) != 1.0) {
            return Err(Error::Invalid("column 0 must be the intercept".into()));
        }
        if let Some(i) = x.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("design row {}", i / k1)));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("target row {i}")));
        }
        if t < 2 * k1 {
            return Err(Error::Invalid(format!(
                "{t} rows cannot support {k1} regression columns"
            )));
        }
        Ok(Self {
            y,
            x,
            names,
            roles,
            dates,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn ar_column(&self) -> Option<usize> {
        self.column_index(AR_COLUMN)
    }

    /// Intercept plus every column that enters the mean equation.
    pub fn mean_columns(&self) -> Vec<usize> {
        self.columns_where(Role::in_mean)
    }

    /// Intercept plus every column that enters the transition equation.
    pub fn transition_columns(&self) -> Vec<usize> {
        self.columns_where(Role::in_transition)
    }

    fn columns_where(&self, keep: impl Fn(Role) -> bool) -> Vec<usize> {
        std::iter::once(0)
            .chain((1..self.names.len()).filter(|&j| keep(self.roles[j])))
            .collect()
    }

    /// First `n` rows.
    pub fn head(&self, n: usize) -> Self {
        Self {
            y: self.y[..n].to_vec(),
            x: self.x.slice_rows(0, n),
            names: self.names.clone(),
            roles: self.roles.clone(),
            dates: self.dates[..n].to_vec(),
        }
    }

    /// SHA-256 over names, roles, dates and the exact bits of every value.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for (name, role) in self.names.iter().zip(&self.roles) {
            h.update(name.as_bytes());
            h.update([0u8, *role as u8]);
        }
        for d in &self.dates {
            h.update(d.format("%Y-%m-%d").to_string().as_bytes());
        }
        for v in self.y.iter().chain(self.x.as_slice()) {
            h.update(v.to_bits().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Build the aligned dataset from a target price series and predictors.
///
/// The target is transformed (percentage log returns by default) and its
/// first `max(1, ar_lag)` rows are dropped. Each predictor contributes the
/// most recent transformed value dated on or before each target date.
pub fn assemble(
    target: &RawSeries,
    predictors: &[PredictorInput],
    opts: AssembleOptions,
) -> Result<AlignedDataset> {
    if opts.ar_lag > 1 {
        return Err(Error::Invalid(format!("ar_lag must be 0 or 1, got {}", opts.ar_lag)));
    }
    let target_t = target.transformed(opts.target_transform, None)?;
    let drop = opts.ar_lag.max(1);
    let n = target_t.values.len();
    if n <= drop + opts.holdout {
        return Err(Error::Invalid(format!(
            "target `{}` too short: {n} transformed rows",
            target.name
        )));
    }
    let dates = target_t.dates[drop..].to_vec();
    let y = target_t.values[drop..].to_vec();
    let t_len = y.len();
    let cutoff = (opts.holdout > 0).then(|| dates[t_len - opts.holdout - 1]);

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(predictors.len() + 1);
    let mut names = vec![INTERCEPT.to_string()];
    let mut roles = vec![Role::Both];
    for p in predictors {
        if p.role == Role::Target {
            return Err(Error::Invalid(format!("predictor `{}` has role target", p.series.name)));
        }
        let s = p.series.transformed(p.transform, cutoff)?;
        let missing = |msg: &str| Error::Calendar {
            name: s.name.clone(),
            message: msg.to_string(),
        };
        if s.dates.last().is_none_or(|last| *last < dates[0]) {
            return Err(missing("no observations inside the target window"));
        }
        let mut col = Vec::with_capacity(t_len);
        for d in &dates {
            let idx = s.dates.partition_point(|pd| pd <= d);
            if idx == 0 {
                return Err(missing(&format!("no value on or before {d}")));
            }
            col.push(s.values[idx - 1]);
        }
        columns.push(col);
        names.push(s.name.clone());
        roles.push(p.role);
    }
    if opts.ar_lag == 1 {
        columns.push(target_t.values[drop - 1..n - 1].to_vec());
        names.push(AR_COLUMN.to_string());
        roles.push(Role::Both);
    }

    let k1 = columns.len() + 1;
    let mut data = Vec::with_capacity(t_len * k1);
    for t in 0..t_len {
        data.push(1.0);
        data.extend(columns.iter().map(|c| c[t]));
    }
    let x = Design::from_row_major(t_len, k1, data)?;
    AlignedDataset::new(y, x, names, roles, dates)
}
