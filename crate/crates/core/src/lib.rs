//! Bayesian hidden Markov regression models for return series.
//!
//! Observations follow a Normal linear regression whose coefficients and
//! variance switch with a hidden Markov chain. Transition probabilities are
//! either constant or a multinomial-logit function of covariates, and all
//! parameters are estimated by MCMC: forward-filtering backward-sampling for
//! the path, conjugate updates for the regressions, Pólya-Gamma augmentation
//! for the logit coefficients and a reversible-jump search over transition
//! predictors. Forecasts are scored with CRPS and MSE.

pub mod data;
pub mod design;
pub mod error;
pub mod forecast;
pub mod hmm;
pub mod math;
pub mod models;
pub mod samplers;
pub mod synthetic;

pub use data::{AlignedDataset, Manifest, RawSeries, Role, TransformKind};
pub use design::Design;
pub use error::{Error, Result};
pub use forecast::{EvaluationReport, PredictiveSample};
pub use hmm::{EmissionParams, StatePath, TransitionModel};
pub use models::{Family, McmcConfig, ModelSpec, PosteriorDraws, Priors};

/// Seeded generator used throughout; ChaCha keeps streams reproducible
/// across platforms and releases.
pub type SeededRng = rand_chacha::ChaCha8Rng;
