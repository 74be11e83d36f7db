//! Reversible-jump selection of transition covariates.
//!
//! Each non-intercept transition column carries an inclusion indicator
//! shared by every cell of the multinomial link. A move toggles one
//! indicator chosen uniformly. Births draw the new coefficients from their
//! prior, so the acceptance ratio reduces to the transition likelihood
//! ratio times the prior odds of inclusion.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::logit::{transition_loglik, LogitCoefs};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::hmm::StatePath;

/// Inclusion indicators for transition columns. Column 0, the intercept,
/// is always in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionState {
    pub gamma: Vec<bool>,
}

impl InclusionState {
    pub fn all(k: usize) -> Self {
        Self { gamma: vec![true; k] }
    }

    pub fn intercept_only(k: usize) -> Self {
        let mut gamma = vec![false; k];
        if k > 0 {
            gamma[0] = true;
        }
        Self { gamma }
    }

    pub fn active(&self) -> Vec<usize> {
        self.gamma.iter().enumerate().filter(|(_, &g)| g).map(|(i, _)| i).collect()
    }
}

/// One reversible-jump move. Returns whether it was accepted; on rejection
/// `coefs` and `state` are unchanged.
pub fn rj_variable_select<R: Rng + ?Sized>(
    rng: &mut R,
    path: &StatePath,
    x_trans: &Design,
    coefs: &mut LogitCoefs,
    state: &mut InclusionState,
    prior_var: f64,
    prior_inclusion: f64,
) -> Result<bool> {
    let k = x_trans.ncols();
    if state.gamma.len() != k {
        return Err(Error::Dimension(format!("{} indicators for {k} columns", state.gamma.len())));
    }
    if !(0.0..=1.0).contains(&prior_inclusion) {
        return Err(Error::Invalid(format!("inclusion probability {prior_inclusion}")));
    }
    if k < 2 {
        return Ok(false);
    }
    let col = 1 + rng.random_range(0..k - 1);
    let m = coefs.len();
    let mut proposal = coefs.clone();
    let birth = !state.gamma[col];
    let sd = prior_var.sqrt();
    for row in proposal.iter_mut() {
        for cell in row.iter_mut().take(m - 1) {
            cell[col] = if birth { sd * rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
        }
    }
    let log_odds = if birth {
        prior_inclusion.ln() - (1.0 - prior_inclusion).ln()
    } else {
        (1.0 - prior_inclusion).ln() - prior_inclusion.ln()
    };
    let log_ratio = transition_loglik(path, x_trans, &proposal) - transition_loglik(path, x_trans, coefs) + log_odds;
    let accept = log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio;
    if accept {
        *coefs = proposal;
        state.gamma[col] = birth;
    }
    Ok(accept)
}

/// Posterior inclusion frequency of each column across stored indicators.
pub fn inclusion_probabilities(draws: &[InclusionState]) -> Result<Vec<f64>> {
    let first = draws.first().ok_or_else(|| Error::Invalid("no inclusion draws".into()))?;
    let k = first.gamma.len();
    let mut freq = vec![0.0; k];
    for d in draws {
        if d.gamma.len() != k {
            return Err(Error::Dimension("inclusion draws differ in length".into()));
        }
        for (f, &g) in freq.iter_mut().zip(&d.gamma) {
            *f += g as u8 as f64;
        }
    }
    Ok(freq.into_iter().map(|f| f / draws.len() as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::super::logit::gibbs_multinomial_logit;
    use super::*;
    use crate::SeededRng;
    use rand::SeedableRng;

    #[test]
    fn certain_prior_inclusion_never_drops() {
        let mut rng = SeededRng::seed_from_u64(31);
        let x = Design::from_rows(&(0..80).map(|t| vec![1.0, (t as f64 * 0.3).sin(), (t as f64).cos()]).collect::<Vec<_>>()).unwrap();
        let path = StatePath::new((0..81).map(|t| (t / 7 % 2) as u8).collect(), 2).unwrap();
        let mut coefs = vec![vec![vec![0.0; 3]; 2]; 2];
        let mut state = InclusionState::all(3);
        for _ in 0..200 {
            rj_variable_select(&mut rng, &path, &x, &mut coefs, &mut state, 10.0, 1.0).unwrap();
            assert_eq!(state, InclusionState::all(3));
        }
    }

    #[test]
    fn flat_likelihood_recovers_prior_inclusion() {
        // One state: the transition likelihood is identically zero.
        let mut rng = SeededRng::seed_from_u64(32);
        let x = Design::from_rows(&(0..40).map(|t| vec![1.0, t as f64, 1.0 / (1.0 + t as f64)]).collect::<Vec<_>>()).unwrap();
        let path = StatePath::constant(41, 0);
        let mut coefs = vec![vec![vec![0.0; 3]]];
        let mut state = InclusionState::intercept_only(3);
        let mut draws = Vec::new();
        for _ in 0..40_000 {
            rj_variable_select(&mut rng, &path, &x, &mut coefs, &mut state, 10.0, 0.3).unwrap();
            draws.push(state.clone());
        }
        let p = inclusion_probabilities(&draws).unwrap();
        assert_eq!(p[0], 1.0);
        assert!((p[1] - 0.3).abs() < 0.03, "{p:?}");
        assert!((p[2] - 0.3).abs() < 0.03, "{p:?}");
    }

    #[test]
    fn signal_included_decoy_excluded() {
        let mut rng = SeededRng::seed_from_u64(33);
        let n = 1500;
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| vec![1.0, rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)]).collect();
        let x = Design::from_rows(&rows).unwrap();
        // Stay probability driven by column 1 only.
        let mut z = vec![0u8; n + 1];
        for t in 0..n {
            let eta = 1.0 + 2.0 * rows[t][1];
            let stay = 1.0 / (1.0 + (-eta).exp());
            z[t + 1] = if rng.random::<f64>() < stay { z[t] } else { 1 - z[t] };
        }
        let path = StatePath::new(z, 2).unwrap();
        let mut coefs = vec![vec![vec![0.0; 3]; 2]; 2];
        let mut state = InclusionState::intercept_only(3);
        let mut draws = Vec::new();
        for it in 0..3000 {
            coefs = gibbs_multinomial_logit(&mut rng, &path, &x, coefs, 10.0, &state.active()).unwrap();
            rj_variable_select(&mut rng, &path, &x, &mut coefs, &mut state, 10.0, 0.5).unwrap();
            if it >= 500 {
                draws.push(state.clone());
            }
        }
        let p = inclusion_probabilities(&draws).unwrap();
        assert!(p[1] > 0.9, "{p:?}");
        assert!(p[2] < 0.5, "{p:?}");
    }

    #[test]
    fn empty_draws_error() {
        assert!(inclusion_probabilities(&[]).is_err());
    }
}
