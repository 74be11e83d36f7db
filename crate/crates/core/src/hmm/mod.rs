//! Hidden Markov machinery: emission densities, covariate-driven transition
//! matrices, forward filtering, smoothing and forward-filtering
//! backward-sampling of state paths.

mod filter;
pub mod oracle;
mod params;
mod transition;

pub use filter::{ffbs_sample, forward_filter, smoothed_probs, ForwardPass};
pub(crate) use filter::sample_log_categorical;
pub use oracle::brute_force_loglik;
pub use params::{uniform_init, EmissionParams, StatePath};
pub use transition::{transition_matrix_at, TransitionModel};
