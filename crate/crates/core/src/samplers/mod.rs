//! MCMC building blocks.

pub mod linreg;
pub mod logit;
pub mod pg;
pub mod rj;

pub use linreg::{gibbs_from_stats, gibbs_linear_regression, ols, LinearRegressionPrior, RegressionStats};
pub use logit::{dirichlet_rows, gibbs_multinomial_logit, transition_counts, transition_loglik, LogitCoefs};
pub use pg::{pg1_mean, pg1_variance, sample_pg, sample_pg1};
pub use rj::{inclusion_probabilities, rj_variable_select, InclusionState};
