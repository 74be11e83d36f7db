//! Semi-conjugate Gibbs update for a Normal linear regression:
//! `B ~ N(m0, V0)` and `sigma2 ~ InvGamma(a0, b0)` a priori, independent.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::design::Design;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LinearRegressionPrior {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    precision: DMatrix<f64>,
    precision_mean: DVector<f64>,
    cov_chol: Cholesky<f64, Dyn>,
    pub shape: f64,
    pub scale: f64,
}

impl LinearRegressionPrior {
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>, shape: f64, scale: f64) -> Result<Self> {
        let k = mean.len();
        if cov.nrows() != k || cov.ncols() != k {
            return Err(Error::Dimension(format!("prior covariance is not {k}x{k}")));
        }
        if (&cov - cov.transpose()).abs().max() > 1e-12 * cov.abs().max().max(1.0) {
            return Err(Error::Invalid("prior covariance is not symmetric".into()));
        }
        if !(shape > 0.0 && scale > 0.0) {
            return Err(Error::Invalid(format!("variance prior IG({shape}, {scale}) is improper")));
        }
        let cov_chol = Cholesky::new(cov.clone()).ok_or(Error::Singular)?;
        let precision = cov_chol.inverse();
        let mean = DVector::from_vec(mean);
        let precision_mean = &precision * &mean;
        Ok(Self {
            mean,
            cov,
            precision,
            precision_mean,
            cov_chol,
            shape,
            scale,
        })
    }

    /// `N(0, var I)` coefficients with an `InvGamma(shape, scale)` variance.
    pub fn isotropic(k: usize, var: f64, shape: f64, scale: f64) -> Result<Self> {
        Self::new(vec![0.0; k], DMatrix::identity(k, k) * var, shape, scale)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }
}

/// Sufficient statistics of one state's observations.
#[derive(Debug, Clone)]
pub struct RegressionStats {
    pub xtx: DMatrix<f64>,
    pub xty: DVector<f64>,
    pub yty: f64,
    pub n: usize,
}

impl RegressionStats {
    pub fn new(k: usize) -> Self {
        Self {
            xtx: DMatrix::zeros(k, k),
            xty: DVector::zeros(k),
            yty: 0.0,
            n: 0,
        }
    }

    pub fn push(&mut self, y: f64, x: &[f64]) {
        let k = x.len();
        for a in 0..k {
            self.xty[a] += x[a] * y;
            for b in a..k {
                self.xtx[(a, b)] += x[a] * x[b];
            }
        }
        self.yty += y * y;
        self.n += 1;
    }

    fn symmetrised(&self) -> DMatrix<f64> {
        let mut m = self.xtx.clone();
        m.fill_lower_triangle_with_upper_triangle();
        m
    }

    pub fn from_rows(y: &[f64], x: &Design) -> Result<Self> {
        if y.len() != x.nrows() {
            return Err(Error::Dimension(format!("{} responses for {} design rows", y.len(), x.nrows())));
        }
        let mut s = Self::new(x.ncols());
        for (t, &yt) in y.iter().enumerate() {
            s.push(yt, x.row(t));
        }
        Ok(s)
    }
}

/// Draw `z ~ N(Q^{-1} r, Q^{-1})` given the precision `Q` and `r`.
pub(crate) fn draw_gaussian_canonical<R: Rng + ?Sized>(
    rng: &mut R,
    precision: DMatrix<f64>,
    r: &DVector<f64>,
) -> Result<DVector<f64>> {
    let k = r.len();
    let chol = Cholesky::new(precision).ok_or(Error::Singular)?;
    let mean = chol.solve(r);
    let z = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let noise = chol
        .l()
        .transpose()
        .solve_upper_triangular(&z)
        .ok_or(Error::Singular)?;
    Ok(mean + noise)
}

pub(crate) fn draw_inverse_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> f64 {
    1.0 / Gamma::new(shape, 1.0 / scale)
        .expect("positive gamma parameters")
        .sample(rng)
}

/// One Gibbs sweep from sufficient statistics: `B | sigma2`, then
/// `sigma2 | B`. With no observations both are prior draws.
pub fn gibbs_from_stats<R: Rng + ?Sized>(
    rng: &mut R,
    stats: &RegressionStats,
    prior: &LinearRegressionPrior,
    sigma2: f64,
) -> Result<(Vec<f64>, f64)> {
    let k = prior.dim();
    if stats.xty.len() != k {
        return Err(Error::Dimension(format!("{} regressors for a {k}-dim prior", stats.xty.len())));
    }
    let coefs = if stats.n == 0 {
        let z = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
        &prior.mean + prior.cov_chol.l() * z
    } else {
        let q = &prior.precision + stats.symmetrised() / sigma2;
        let r = &prior.precision_mean + &stats.xty / sigma2;
        draw_gaussian_canonical(rng, q, &r)?
    };
    let ssr = if stats.n == 0 {
        0.0
    } else {
        let xtx = stats.symmetrised();
        (stats.yty - 2.0 * coefs.dot(&stats.xty) + coefs.dot(&(xtx * &coefs))).max(0.0)
    };
    let new_sigma2 = draw_inverse_gamma(rng, prior.shape + 0.5 * stats.n as f64, prior.scale + 0.5 * ssr);
    Ok((coefs.as_slice().to_vec(), new_sigma2))
}

/// Gibbs update for one state's regression on the rows assigned to it.
pub fn gibbs_linear_regression<R: Rng + ?Sized>(
    rng: &mut R,
    y: &[f64],
    x: &Design,
    prior: &LinearRegressionPrior,
    sigma2: f64,
) -> Result<(Vec<f64>, f64)> {
    if x.ncols() != prior.dim() && x.nrows() > 0 {
        return Err(Error::Dimension(format!("design has {} columns, prior {}", x.ncols(), prior.dim())));
    }
    let stats = if x.nrows() == 0 {
        RegressionStats::new(prior.dim())
    } else {
        RegressionStats::from_rows(y, x)?
    };
    gibbs_from_stats(rng, &stats, prior, sigma2)
}

/// Ordinary least squares coefficients and residual variance (`n - k` denominator).
pub fn ols(y: &[f64], x: &Design) -> Result<(Vec<f64>, f64)> {
    let stats = RegressionStats::from_rows(y, x)?;
    let xtx = stats.symmetrised();
    let beta = Cholesky::new(xtx.clone()).ok_or(Error::Singular)?.solve(&stats.xty);
    let ssr = (stats.yty - 2.0 * beta.dot(&stats.xty) + beta.dot(&(xtx * &beta))).max(0.0);
    let dof = (stats.n.saturating_sub(x.ncols())).max(1) as f64;
    Ok((beta.as_slice().to_vec(), ssr / dof))
}
