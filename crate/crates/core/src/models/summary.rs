//! Posterior means per state with 90% credible-interval flags and, under
//! variable search, inclusion probabilities of the transition predictors.

use std::fmt::Write as _;

use super::draws::PosteriorDraws;
use crate::error::{Error, Result};
use crate::math::{mean, quantile_sorted, sort_floats};
use crate::samplers::{inclusion_probabilities, InclusionState};

/// Inclusion probabilities at or above this are highlighted.
pub const INCLUSION_HIGHLIGHT: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    /// Mean with the central 90% interval of `values`.
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        sort_floats(&mut v);
        Self {
            mean: mean(&v),
            lower: quantile_sorted(&v, 0.05),
            upper: quantile_sorted(&v, 0.95),
        }
    }

    /// Zero lies outside the interval.
    pub fn significant(&self) -> bool {
        self.lower > 0.0 || self.upper < 0.0
    }

    fn cell(&self) -> String {
        format!("{:.2}{}", self.mean, if self.significant() { "*" } else { "" })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    /// One entry per state; `None` when the column is not in the mean equation.
    pub coefs: Option<Vec<Interval>>,
    pub inclusion: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub model: String,
    pub states: usize,
    pub rows: Vec<SummaryRow>,
    pub sigma2: Vec<Interval>,
}

pub fn posterior_summary(draws: &PosteriorDraws) -> Result<PosteriorSummary> {
    if draws.is_empty() {
        return Err(Error::Invalid("no posterior draws".into()));
    }
    let m = draws.states();
    let layout = &draws.layout;
    let inclusion = if draws.draws[0].inclusion.is_some() {
        let g: Vec<InclusionState> = draws.draws.iter().filter_map(|d| d.inclusion.clone()).collect();
        Some(inclusion_probabilities(&g)?)
    } else {
        None
    };
    let mut names: Vec<&String> = layout.mean_names.iter().collect();
    if inclusion.is_some() {
        names.extend(layout.trans_names.iter().filter(|n| !layout.mean_names.contains(n)));
    }
    let rows = names
        .into_iter()
        .map(|name| {
            let coefs = layout.mean_names.iter().position(|n| n == name).map(|k| {
                (0..m)
                    .map(|s| Interval::of(&draws.draws.iter().map(|d| d.emissions.coefs[s][k]).collect::<Vec<_>>()))
                    .collect()
            });
            let inc = inclusion
                .as_ref()
                .and_then(|p| layout.trans_names.iter().position(|n| n == name).map(|j| p[j]));
            SummaryRow {
                name: name.clone(),
                coefs,
                inclusion: inc,
            }
        })
        .collect();
    let sigma2 = (0..m)
        .map(|s| Interval::of(&draws.draws.iter().map(|d| d.emissions.sigma2[s]).collect::<Vec<_>>()))
        .collect();
    Ok(PosteriorSummary {
        model: draws.spec.abbreviation(),
        states: m,
        rows,
        sigma2,
    })
}

/// Two-decimal probability, wrapped in `**` at or above the highlight threshold.
pub fn format_inclusion(p: f64) -> String {
    if p >= INCLUSION_HIGHLIGHT {
        format!("**{p:.2}**")
    } else {
        format!("{p:.2}")
    }
}

impl PosteriorSummary {
    fn has_inclusion(&self) -> bool {
        self.rows.iter().any(|r| r.inclusion.is_some())
    }

    /// Aligned text table; `*` marks coefficients whose 90% interval excludes zero.
    pub fn render_text(&self) -> String {
        let mut header = vec!["Predictors".to_string()];
        header.extend((1..=self.states).map(|s| format!("State {s}")));
        if self.has_inclusion() {
            header.push("Probabilities".into());
        }
        let mut table = vec![header];
        for r in &self.rows {
            let mut line = vec![r.name.clone()];
            match &r.coefs {
                Some(c) => line.extend(c.iter().map(Interval::cell)),
                None => line.extend((0..self.states).map(|_| "-".to_string())),
            }
            if self.has_inclusion() {
                line.push(r.inclusion.map(format_inclusion).unwrap_or_else(|| "-".into()));
            }
            table.push(line);
        }
        let mut var = vec!["Variance".to_string()];
        var.extend(self.sigma2.iter().map(|i| format!("{:.2}", i.mean)));
        if self.has_inclusion() {
            var.push(String::new());
        }
        table.push(var);
        let mut out = format!("{}\n", self.model);
        out.push_str(&align(&table));
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Invalid(format!("summary csv: {e}"));
        let mut head = vec!["predictor".to_string()];
        for s in 1..=self.states {
            head.extend(["mean", "lower90", "upper90", "significant"].iter().map(|c| format!("state{s}_{c}")));
        }
        head.push("inclusion".into());
        w.write_record(&head).map_err(csv_err)?;
        let push_intervals = |rec: &mut Vec<String>, iv: Option<&Vec<Interval>>| match iv {
            Some(c) => {
                for i in c {
                    rec.extend([i.mean.to_string(), i.lower.to_string(), i.upper.to_string(), i.significant().to_string()]);
                }
            }
            None => rec.extend((0..4 * self.states).map(|_| String::new())),
        };
        for r in &self.rows {
            let mut rec = vec![r.name.clone()];
            push_intervals(&mut rec, r.coefs.as_ref());
            rec.push(r.inclusion.map(|p| p.to_string()).unwrap_or_default());
            w.write_record(&rec).map_err(csv_err)?;
        }
        let mut rec = vec!["sigma2".to_string()];
        push_intervals(&mut rec, Some(&self.sigma2));
        rec.push(String::new());
        w.write_record(&rec).map_err(csv_err)?;
        let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("summary csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Left-align the first column, right-align the rest.
pub fn align(rows: &[Vec<String>]) -> String {
    let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
    let width: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (c, cell) in r.iter().enumerate() {
            if c == 0 {
                let _ = write!(line, "{cell:<w$}", w = width[0]);
            } else {
                let _ = write!(line, "  {cell:>w$}", w = width[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
