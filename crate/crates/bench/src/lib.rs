//! Fixtures shared by the benchmarks.

use regimes_core::data::Role;
use regimes_core::synthetic::{generate, Covariates, GenerativeSpec, Generated};
use regimes_core::{EmissionParams, TransitionModel};

/// An `m`-state multinomial-link dataset with three transition covariates.
pub fn nhhm_fixture(m: usize, len: usize, seed: u64) -> Generated {
    let k = 4;
    let coefs = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if j + 1 == m {
                        vec![0.0; k]
                    } else {
                        (0..k).map(|c| if i == j && c == 0 { 2.0 } else { 0.3 * ((i + j + c) % 3) as f64 - 0.3 }).collect()
                    }
                })
                .collect()
        })
        .collect();
    let spec = GenerativeSpec {
        emissions: EmissionParams::new(
            (0..m).map(|s| vec![s as f64 - 1.0]).collect(),
            (0..m).map(|s| 1.0 + s as f64).collect(),
        )
        .expect("valid emissions"),
        transition: TransitionModel::multinomial(coefs).expect("valid transition"),
        covariate_roles: vec![Role::TransitionOnly; k - 1],
        ar_role: None,
        covariates: Covariates::Normal,
        len,
        seed,
    };
    generate(&spec).expect("fixture generates")
}
