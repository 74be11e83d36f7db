use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{dot, log_sum_exp};

/// Transition probabilities, either time-constant or a multinomial-logit
/// function of covariates.
///
/// `Multinomial.coefs[i][j]` holds the coefficient vector for moving from
/// state `i` to state `j`. The last state is the baseline category: its
/// coefficients are identically zero in every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransitionModel {
    Constant { matrix: Vec<Vec<f64>> },
    Multinomial { coefs: Vec<Vec<Vec<f64>>> },
}

const ROW_TOL: f64 = 1e-12;

impl TransitionModel {
    pub fn constant(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let m = matrix.len();
        if m == 0 || matrix.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("transition matrix must be square".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::Invalid(format!("row {} has entries outside [0, 1]", i + 1)));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::Invalid(format!("row {} sums to {s}", i + 1)));
            }
        }
        Ok(TransitionModel::Constant { matrix })
    }

    pub fn uniform(m: usize) -> Self {
        TransitionModel::Constant {
            matrix: vec![vec![1.0 / m as f64; m]; m],
        }
    }

    pub fn multinomial(coefs: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let m = coefs.len();
        if m == 0 || coefs.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("coefficient grid must be m x m".into()));
        }
        let k = coefs[0][0].len();
        for (i, row) in coefs.iter().enumerate() {
            if row.iter().any(|c| c.len() != k) {
                return Err(Error::Dimension("coefficient vectors differ in length".into()));
            }
            if row[m - 1].iter().any(|&b| b != 0.0) {
                return Err(Error::Invalid(format!("baseline coefficients of row {} are not zero", i + 1)));
            }
            if row.iter().flatten().any(|b| !b.is_finite()) {
                return Err(Error::NonFinite(format!("coefficients of row {}", i + 1)));
            }
        }
        Ok(TransitionModel::Multinomial { coefs })
    }

    /// All-zero multinomial coefficients (uniform rows).
    pub fn zero_multinomial(m: usize, k: usize) -> Self {
        TransitionModel::Multinomial {
            coefs: vec![vec![vec![0.0; k]; m]; m],
        }
    }

    pub fn states(&self) -> usize {
        match self {
            TransitionModel::Constant { matrix } => matrix.len(),
            TransitionModel::Multinomial { coefs } => coefs.len(),
        }
    }

    pub fn is_time_varying(&self) -> bool {
        matches!(self, TransitionModel::Multinomial { .. })
    }

    /// Row-major `m x m` log transition probabilities at covariates `x`.
    pub fn log_matrix_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let m = self.states();
        debug_assert_eq!(out.len(), m * m);
        match self {
            TransitionModel::Constant { matrix } => {
                for (i, row) in matrix.iter().enumerate() {
                    for (j, p) in row.iter().enumerate() {
                        out[i * m + j] = p.ln();
                    }
                }
            }
            TransitionModel::Multinomial { coefs } => {
                if coefs[0][0].len() != x.len() {
                    return Err(Error::Dimension(format!(
                        "covariate row has {} entries, coefficients {}",
                        x.len(),
                        coefs[0][0].len()
                    )));
                }
                for (i, row) in coefs.iter().enumerate() {
                    let eta = &mut out[i * m..(i + 1) * m];
                    for (j, b) in row.iter().enumerate() {
                        eta[j] = dot(x, b);
                    }
                    if eta.iter().any(|v| !v.is_finite()) {
                        return Err(Error::NonFinite(format!("linear predictor in row {}", i + 1)));
                    }
                    let lse = log_sum_exp(eta);
                    eta.iter_mut().for_each(|v| *v -= lse);
                }
            }
        }
        Ok(())
    }

    /// Relabel so that new state `a` is old state `perm[a]`. Multinomial
    /// rows are re-centred so the new last state stays the zero baseline.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        match self {
            TransitionModel::Constant { matrix } => TransitionModel::Constant {
                matrix: perm
                    .iter()
                    .map(|&pi| perm.iter().map(|&pj| matrix[pi][pj]).collect())
                    .collect(),
            },
            TransitionModel::Multinomial { coefs } => {
                let base = *perm.last().expect("non-empty permutation");
                TransitionModel::Multinomial {
                    coefs: perm
                        .iter()
                        .map(|&pi| {
                            perm.iter()
                                .map(|&pj| {
                                    coefs[pi][pj]
                                        .iter()
                                        .zip(&coefs[pi][base])
                                        .map(|(a, b)| a - b)
                                        .collect()
                                })
                                .collect()
                        })
                        .collect(),
                }
            }
        }
    }
}

/// Stochastic matrix in force at covariates `x` (governs the move from
/// time `t` to `t + 1` when `x` is the covariate row of time `t`).
pub fn transition_matrix_at(model: &TransitionModel, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let m = model.states();
    if let TransitionModel::Constant { matrix } = model {
        return Ok(matrix.clone());
    }
    let mut buf = vec![0.0; m * m];
    model.log_matrix_into(x, &mut buf)?;
    Ok(buf
        .chunks(m)
        .map(|row| row.iter().map(|v| v.exp()).collect())
        .collect())
}
