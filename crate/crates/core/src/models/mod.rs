//! Model roster and the MCMC driver.
//!
//! Switching families iterate: forward-filtering backward-sampling of the
//! path, a conjugate regression update per state, then the transition
//! update (Pólya-Gamma Gibbs for multinomial links, Dirichlet rows for
//! constant matrices) and optionally a variable-search move. Single-regime
//! families run the regression update alone. Stored draws are relabelled
//! so state variances decrease.

mod design;
mod draws;
mod fit;
mod spec;
mod summary;

pub use design::{DesignLayout, ModelDesign};
pub use draws::{Draw, PosteriorDraws, FORMAT as DRAWS_FORMAT, VERSION as DRAWS_VERSION};
pub use fit::{fit, fit_design, fit_msrw, fit_with_priors, replicate_insample};
pub use spec::{Family, McmcConfig, ModelSpec, Priors, STANDARD_ROSTER};
pub use summary::{align, format_inclusion, posterior_summary, Interval, PosteriorSummary, SummaryRow, INCLUSION_HIGHLIGHT};
