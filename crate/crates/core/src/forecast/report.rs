use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::scores::{crps_empirical, mse};
use super::PredictiveSample;
use crate::error::{Error, Result};
use crate::hmm::StatePath;
use crate::math::{mean, sample_variance};
use crate::models::align;

/// Horizons shown in the ranking table when available.
pub const SPOT_HORIZONS: [usize; 5] = [1, 2, 7, 15, 30];

pub fn spot_horizons(horizons: usize) -> Vec<usize> {
    SPOT_HORIZONS.iter().copied().filter(|&h| h <= horizons).collect()
}

/// Per-time state frequencies across sampled paths (`T x m`).
pub fn path_frequencies(paths: &[&StatePath], m: usize) -> Result<Vec<Vec<f64>>> {
    let first = paths.first().ok_or_else(|| Error::Invalid("no paths".into()))?;
    let t_len = first.len();
    if paths.iter().any(|p| p.len() != t_len) {
        return Err(Error::Dimension("paths differ in length".into()));
    }
    let mut freq = vec![vec![0.0; m]; t_len];
    for p in paths {
        for (t, row) in freq.iter_mut().enumerate() {
            let s = p.get(t);
            if s >= m {
                return Err(Error::Dimension(format!("state {} in a {m}-state model", s + 1)));
            }
            row[s] += 1.0;
        }
    }
    let n = paths.len() as f64;
    freq.iter_mut().flatten().for_each(|v| *v /= n);
    Ok(freq)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    /// One-based label.
    pub state: usize,
    pub occupancy: f64,
    /// Time points assigned to the state by the most probable classification.
    pub count: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

/// Occupancy averaged over paths; moments of `y` over the points whose
/// most frequent state is `s` (ties go to the lower label).
pub fn state_summary(paths: &[&StatePath], y: &[f64], m: usize) -> Result<Vec<StateSummary>> {
    let freq = path_frequencies(paths, m)?;
    if freq.len() != y.len() {
        return Err(Error::Dimension(format!("{} path steps for {} observations", freq.len(), y.len())));
    }
    let mut groups = vec![Vec::new(); m];
    for (row, &v) in freq.iter().zip(y) {
        let best = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(Ordering::Equal).then(b.0.cmp(&a.0)))
            .map(|(s, _)| s)
            .unwrap_or(0);
        groups[best].push(v);
    }
    let t_len = y.len() as f64;
    Ok(groups
        .into_iter()
        .enumerate()
        .map(|(s, g)| StateSummary {
            state: s + 1,
            occupancy: freq.iter().map(|r| r[s]).sum::<f64>() / t_len,
            count: g.len(),
            mean: (!g.is_empty()).then(|| mean(&g)),
            std: (g.len() >= 2).then(|| sample_variance(&g).sqrt()),
        })
        .collect())
}

fn opt2(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into())
}

impl StateSummary {
    pub fn render_table(rows: &[StateSummary]) -> String {
        let mut table = vec![vec!["State".to_string(), "Occupancy".into(), "Average".into(), "Std".into()]];
        for r in rows {
            table.push(vec![r.state.to_string(), format!("{:.2}", r.occupancy), opt2(r.mean), opt2(r.std)]);
        }
        align(&table)
    }
}

/// Per-horizon and average scores of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model: String,
    pub horizons: Vec<usize>,
    pub crps: Vec<f64>,
    pub mse: Vec<f64>,
    pub avg_crps: f64,
    pub avg_mse: f64,
}

impl EvaluationReport {
    pub fn from_samples(model: impl Into<String>, samples: &[PredictiveSample]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Invalid("no predictive samples".into()));
        }
        let crps = samples.iter().map(crps_empirical).collect::<Result<Vec<_>>>()?;
        let mse = samples.iter().map(mse).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model: model.into(),
            horizons: samples.iter().map(|s| s.horizon).collect(),
            avg_crps: mean(&crps),
            avg_mse: mean(&mse),
            crps,
            mse,
        })
    }
}

/// Reports sorted by average CRPS, then average MSE, then name.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub horizons: Vec<usize>,
    pub reports: Vec<EvaluationReport>,
}

pub fn compare_models(reports: &[EvaluationReport]) -> Result<Ranking> {
    let first = reports.first().ok_or_else(|| Error::Invalid("no reports to compare".into()))?;
    if let Some(r) = reports.iter().find(|r| r.horizons != first.horizons) {
        return Err(Error::Dimension(format!("{} and {} cover different horizons", first.model, r.model)));
    }
    let mut sorted = reports.to_vec();
    sorted.sort_by(|a, b| {
        a.avg_crps
            .total_cmp(&b.avg_crps)
            .then(a.avg_mse.total_cmp(&b.avg_mse))
            .then_with(|| a.model.cmp(&b.model))
    });
    Ok(Ranking {
        horizons: first.horizons.clone(),
        reports: sorted,
    })
}

fn cell(crps: f64, mse: f64, best: bool) -> String {
    let c = format!("{crps:.2} ({mse:.2})");
    if best {
        format!("**{c}**")
    } else {
        c
    }
}

impl Ranking {
    fn column(&self, idx: Option<usize>) -> Vec<(f64, f64)> {
        self.reports
            .iter()
            .map(|r| match idx {
                Some(i) => (r.crps[i], r.mse[i]),
                None => (r.avg_crps, r.avg_mse),
            })
            .collect()
    }

    /// `CRPS (MSE)` cells for the spot horizons and the average, the lowest
    /// CRPS of each column in `**`.
    pub fn render_text(&self) -> String {
        let spots: Vec<(usize, usize)> = spot_horizons(self.horizons.iter().copied().max().unwrap_or(0))
            .into_iter()
            .filter_map(|h| self.horizons.iter().position(|&x| x == h).map(|i| (h, i)))
            .collect();
        let mut cols: Vec<(String, Vec<(f64, f64)>)> =
            spots.iter().map(|&(h, i)| (h.to_string(), self.column(Some(i)))).collect();
        cols.push(("Average".into(), self.column(None)));
        let mut table = vec![std::iter::once("Model".to_string()).chain(cols.iter().map(|c| c.0.clone())).collect()];
        let best: Vec<f64> = cols.iter().map(|c| c.1.iter().map(|v| v.0).fold(f64::INFINITY, f64::min)).collect();
        for (k, r) in self.reports.iter().enumerate() {
            let mut line = vec![r.model.clone()];
            for (c, (_, vals)) in cols.iter().enumerate() {
                line.push(cell(vals[k].0, vals[k].1, vals[k].0 == best[c]));
            }
            table.push(line);
        }
        align(&table)
    }

    /// Wide table: one row per model, `CRPS (MSE)` per horizon, then the average.
    pub fn to_wide_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Invalid(format!("ranking csv: {e}"));
        let mut head = vec!["model".to_string()];
        head.extend(self.horizons.iter().map(usize::to_string));
        head.push("average".into());
        w.write_record(&head).map_err(err)?;
        for r in &self.reports {
            let mut rec = vec![r.model.clone()];
            rec.extend(r.crps.iter().zip(&r.mse).map(|(c, m)| cell(*c, *m, false)));
            rec.push(cell(r.avg_crps, r.avg_mse, false));
            w.write_record(&rec).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("ranking csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Long table at full precision: `model,horizon,crps,mse`, with
    /// `average` as the horizon of the summary rows.
    pub fn to_long_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Invalid(format!("ranking csv: {e}"));
        w.write_record(["model", "horizon", "crps", "mse"]).map_err(err)?;
        for r in &self.reports {
            for (k, h) in r.horizons.iter().enumerate() {
                w.write_record([r.model.clone(), h.to_string(), r.crps[k].to_string(), r.mse[k].to_string()])
                    .map_err(err)?;
            }
            w.write_record([r.model.clone(), "average".into(), r.avg_crps.to_string(), r.avg_mse.to_string()])
                .map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("ranking csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
