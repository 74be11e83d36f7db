//! Retained MCMC draws and their file format.
//!
//! The file is JSON lines: a header object, then one draw per line in
//! retention order.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::design::DesignLayout;
use super::spec::{McmcConfig, ModelSpec, Priors};
use crate::error::{Error, Result};
use crate::hmm::{EmissionParams, StatePath, TransitionModel};
use crate::samplers::InclusionState;

pub const FORMAT: &str = "regimes-draws";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub emissions: EmissionParams,
    pub transition: TransitionModel,
    pub path: StatePath,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inclusion: Option<InclusionState>,
    /// Log-likelihood at the parameters that generated `path`.
    pub loglik: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    spec: ModelSpec,
    config: McmcConfig,
    priors: Priors,
    fingerprint: String,
    layout: DesignLayout,
    rj_acceptance: Option<f64>,
    draws: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub spec: ModelSpec,
    pub config: McmcConfig,
    pub priors: Priors,
    /// Fingerprint of the training dataset.
    pub fingerprint: String,
    pub layout: DesignLayout,
    pub rj_acceptance: Option<f64>,
    pub draws: Vec<Draw>,
}

impl PosteriorDraws {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn states(&self) -> usize {
        self.spec.states
    }

    pub fn paths(&self) -> Vec<&StatePath> {
        self.draws.iter().map(|d| &d.path).collect()
    }

    pub fn check_fingerprint(&self, actual: &str) -> Result<()> {
        if self.fingerprint != actual {
            return Err(Error::Fingerprint {
                expected: self.fingerprint.clone(),
                actual: actual.to_string(),
            });
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = Header {
            format: FORMAT.into(),
            version: VERSION,
            spec: self.spec.clone(),
            config: self.config,
            priors: self.priors,
            fingerprint: self.fingerprint.clone(),
            layout: self.layout.clone(),
            rj_acceptance: self.rj_acceptance,
            draws: self.draws.len(),
        };
        let io = |e: std::io::Error| Error::io("<draws>", e);
        let js = |e: serde_json::Error| Error::Invalid(format!("serialising draws: {e}"));
        serde_json::to_writer(&mut w, &header).map_err(js)?;
        w.write_all(b"\n").map_err(io)?;
        for d in &self.draws {
            serde_json::to_writer(&mut w, d).map_err(js)?;
            w.write_all(b"\n").map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf
    }

    pub fn read_from<R: BufRead>(r: R, origin: &str) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::parse(origin, format!("missing {what}")))?
                .map_err(|e| Error::io(origin, e))
        };
        let header: Header =
            serde_json::from_str(&next("header")?).map_err(|e| Error::parse(origin, format!("header: {e}")))?;
        if header.format != FORMAT || header.version != VERSION {
            return Err(Error::parse(
                origin,
                format!("unsupported format {} v{}", header.format, header.version),
            ));
        }
        header.spec.validate()?;
        let mut draws = Vec::with_capacity(header.draws);
        for i in 0..header.draws {
            let line = next(&format!("draw {}", i + 1))?;
            let d: Draw = serde_json::from_str(&line).map_err(|e| Error::parse(origin, format!("draw {}: {e}", i + 1)))?;
            if d.emissions.states() != header.spec.states || d.emissions.n_coefs() != header.layout.mean_names.len() {
                return Err(Error::parse(origin, format!("draw {} has the wrong dimensions", i + 1)));
            }
            draws.push(d);
        }
        Ok(Self {
            spec: header.spec,
            config: header.config,
            priors: header.priors,
            fingerprint: header.fingerprint,
            layout: header.layout,
            rj_acceptance: header.rj_acceptance,
            draws,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(std::io::BufReader::new(f), &path.display().to_string())
    }

    /// Parameter traces, one row per draw.
    pub fn trace_csv(&self) -> Result<String> {
        let m = self.states();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = vec!["draw".to_string(), "loglik".to_string()];
        for s in 1..=m {
            head.extend(self.layout.mean_names.iter().map(|n| format!("{n}[{s}]")));
            head.push(format!("sigma2[{s}]"));
        }
        if let Some(first) = self.draws.first() {
            match &first.transition {
                TransitionModel::Constant { .. } if m > 1 => {
                    for i in 1..=m {
                        head.extend((1..=m).map(|j| format!("p{i}{j}")));
                    }
                }
                TransitionModel::Multinomial { .. } => {
                    for i in 1..=m {
                        for j in 1..m {
                            head.extend(self.layout.trans_names.iter().map(|n| format!("beta{i}{j}:{n}")));
                        }
                    }
                }
                _ => {}
            }
            if first.inclusion.is_some() {
                head.extend(self.layout.trans_names.iter().map(|n| format!("gamma:{n}")));
            }
        }
        let csv_err = |e: csv::Error| Error::Invalid(format!("trace csv: {e}"));
        w.write_record(&head).map_err(csv_err)?;
        for (n, d) in self.draws.iter().enumerate() {
            let mut row = vec![(n + 1).to_string(), d.loglik.to_string()];
            for s in 0..m {
                row.extend(d.emissions.coefs[s].iter().map(f64::to_string));
                row.push(d.emissions.sigma2[s].to_string());
            }
            match &d.transition {
                TransitionModel::Constant { matrix } if m > 1 => row.extend(matrix.iter().flatten().map(f64::to_string)),
                TransitionModel::Multinomial { coefs } => {
                    for r in coefs {
                        row.extend(r[..m - 1].iter().flatten().map(f64::to_string));
                    }
                }
                _ => {}
            }
            if let Some(g) = &d.inclusion {
                row.extend(g.gamma.iter().map(|&b| (b as u8).to_string()));
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("trace csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
