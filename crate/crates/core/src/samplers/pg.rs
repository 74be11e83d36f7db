//! Exact Pólya-Gamma sampling.
//!
//! `PG(1, c)` is drawn as `J*(1, |c|/2) / 4`, where `J*` is sampled with
//! Devroye's alternating-series rejection method: the proposal is an
//! exponential tail right of the truncation point and a truncated inverse
//! Gaussian to its left.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::math::log_norm_cdf;

const TRUNC: f64 = 0.64;
const TRUNC_RECIP: f64 = 1.0 / TRUNC;

/// Draw `PG(b, c)` as a sum of `b` independent `PG(1, c)` variates.
///
/// # Panics
/// If `b == 0`.
pub fn sample_pg<R: Rng + ?Sized>(rng: &mut R, b: u32, c: f64) -> f64 {
    assert!(b >= 1, "PG shape must be at least 1");
    (0..b).map(|_| sample_pg1(rng, c)).sum()
}

#[inline]
pub fn sample_pg1<R: Rng + ?Sized>(rng: &mut R, c: f64) -> f64 {
    0.25 * sample_jstar(rng, 0.5 * c.abs())
}

/// Series coefficient `a_n(x)` of the `J*(1, 0)` density.
fn a_coef(n: u32, x: f64) -> f64 {
    let k = n as f64 + 0.5;
    let kpi = k * PI;
    if x > TRUNC {
        kpi * (-0.5 * kpi * kpi * x).exp()
    } else if x > 0.0 {
        (-1.5 * ((0.5 * PI).ln() + x.ln()) + kpi.ln() - 2.0 * k * k / x).exp()
    } else {
        0.0
    }
}

/// Probability of proposing from the right-hand exponential piece.
fn right_mass(z: f64) -> f64 {
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let s = TRUNC_RECIP.sqrt();
    let b = s * (TRUNC * z - 1.0);
    let a = -s * (TRUNC * z + 1.0);
    let x0 = fz.ln() + fz * TRUNC;
    let xb = x0 - z + log_norm_cdf(b);
    let xa = x0 + z + log_norm_cdf(a);
    let q_over_p = 4.0 / PI * (xb.exp() + xa.exp());
    1.0 / (1.0 + q_over_p)
}

/// Inverse Gaussian `IG(1/z, 1)` truncated to `(0, TRUNC)`.
fn truncated_inverse_gaussian<R: Rng + ?Sized>(rng: &mut R, z: f64) -> f64 {
    if TRUNC_RECIP > z {
        // Mean beyond the truncation point: a truncated Lévy draw, tilted.
        loop {
            let e1 = loop {
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                if e1 * e1 <= 2.0 * e2 / TRUNC {
                    break e1;
                }
            };
            let d = 1.0 + e1 * TRUNC;
            let x = TRUNC / (d * d);
            if rng.random::<f64>() <= (-0.5 * z * z * x).exp() {
                return x;
            }
        }
    } else {
        let mu = 1.0 / z;
        loop {
            let n: f64 = rng.sample(StandardNormal);
            let y = n * n;
            let mu_y = mu * y;
            let mut x = mu + 0.5 * mu * mu_y - 0.5 * mu * (4.0 * mu_y + mu_y * mu_y).sqrt();
            if rng.random::<f64>() > mu / (mu + x) {
                x = mu * mu / x;
            }
            if x < TRUNC {
                return x;
            }
        }
    }
}

fn sample_jstar<R: Rng + ?Sized>(rng: &mut R, z: f64) -> f64 {
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let p_right = right_mass(z);
    loop {
        let x = if rng.random::<f64>() < p_right {
            let e: f64 = rng.sample(Exp1);
            TRUNC + e / fz
        } else {
            truncated_inverse_gaussian(rng, z)
        };
        let mut s = a_coef(0, x);
        let y = rng.random::<f64>() * s;
        let mut n = 0;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= a_coef(n, x);
                if y <= s {
                    return x;
                }
            } else {
                s += a_coef(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

/// `E[PG(1, c)] = tanh(c/2) / (2c)`, with limit 1/4 at `c = 0`.
pub fn pg1_mean(c: f64) -> f64 {
    if c.abs() < 1e-6 {
        0.25 - c * c / 48.0
    } else {
        (0.5 * c).tanh() / (2.0 * c)
    }
}

/// `Var[PG(1, c)] = (sinh(c) - c) sech²(c/2) / (4c³)`, limit 1/24 at `c = 0`.
pub fn pg1_variance(c: f64) -> f64 {
    if c.abs() < 1e-3 {
        1.0 / 24.0 - c * c / 120.0
    } else {
        let sech = 1.0 / (0.5 * c).cosh();
        (c.sinh() - c) * sech * sech / (4.0 * c * c * c)
    }
}
