use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::math::{dot, normal_log_pdf};

/// Per-state regression coefficients and residual variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionParams {
    pub coefs: Vec<Vec<f64>>,
    pub sigma2: Vec<f64>,
}

impl EmissionParams {
    pub fn new(coefs: Vec<Vec<f64>>, sigma2: Vec<f64>) -> Result<Self> {
        if coefs.is_empty() || coefs.len() != sigma2.len() {
            return Err(Error::Dimension(format!(
                "{} coefficient vectors for {} variances",
                coefs.len(),
                sigma2.len()
            )));
        }
        let k = coefs[0].len();
        if coefs.iter().any(|c| c.len() != k) {
            return Err(Error::Dimension("coefficient vectors differ in length".into()));
        }
        if let Some(s) = sigma2.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Invalid(format!("variance of state {} is {}", s + 1, sigma2[s])));
        }
        Ok(Self { coefs, sigma2 })
    }

    pub fn states(&self) -> usize {
        self.sigma2.len()
    }

    pub fn n_coefs(&self) -> usize {
        self.coefs[0].len()
    }

    #[inline]
    pub fn mean(&self, s: usize, x: &[f64]) -> f64 {
        dot(&self.coefs[s], x)
    }

    #[inline]
    pub fn log_density(&self, s: usize, y: f64, x: &[f64]) -> f64 {
        normal_log_pdf(y, self.mean(s, x), self.sigma2[s])
    }

    /// New labelling where state `a` is old state `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            coefs: perm.iter().map(|&p| self.coefs[p].clone()).collect(),
            sigma2: perm.iter().map(|&p| self.sigma2[p]).collect(),
        }
    }
}

/// Hidden state sequence, stored with zero-based labels.
///
/// Serialises as a string of one-based state digits, e.g. `"1121"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StatePath(Vec<u8>);

impl StatePath {
    pub fn new(labels: Vec<u8>, states: usize) -> Result<Self> {
        if let Some(t) = labels.iter().position(|&s| s as usize >= states) {
            return Err(Error::Invalid(format!(
                "state {} at time {t} outside 1..={states}",
                labels[t] as usize + 1
            )));
        }
        Ok(Self(labels))
    }

    pub fn constant(len: usize, state: u8) -> Self {
        Self(vec![state; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, t: usize) -> usize {
        self.0[t] as usize
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn relabeled(&self, perm: &[usize]) -> Self {
        // inverse: old label -> new label
        let mut inv = vec![0u8; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new as u8;
        }
        Self(self.0.iter().map(|&s| inv[s as usize]).collect())
    }

    pub fn to_digits(&self) -> String {
        self.0.iter().map(|&s| char::from(b'1' + s)).collect()
    }

    pub fn from_digits(s: &str) -> Result<Self> {
        s.bytes()
            .map(|b| match b {
                b'1'..=b'9' => Ok(b - b'1'),
                _ => Err(Error::Invalid(format!("bad state digit `{}`", b as char))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl Serialize for StatePath {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_digits())
    }
}

impl<'de> Deserialize<'de> for StatePath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        StatePath::from_digits(&s).map_err(serde::de::Error::custom)
    }
}

/// Uniform initial distribution over `m` states.
pub fn uniform_init(m: usize) -> Vec<f64> {
    vec![1.0 / m as f64; m]
}
