use serde::{Deserialize, Serialize};

use super::JointPmf;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Per-letter distortion d(x, xhat), rows indexed by the source symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionMatrix<T> {
    pub rows: Vec<Vec<T>>,
}

impl<T: Real> DistortionMatrix<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(Error::Config("distortion matrix must be a non-empty rectangle".into()));
        }
        if rows.iter().flatten().any(|d| !d.is_finite() || *d < T::zero()) {
            return Err(Error::Config("distortion entries must be finite and nonnegative".into()));
        }
        Ok(Self { rows })
    }

    pub fn hamming(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::zero() } else { T::one() }).collect())
            .collect();
        Self { rows }
    }

    pub fn source_size(&self) -> usize {
        self.rows.len()
    }

    pub fn recon_size(&self) -> usize {
        self.rows[0].len()
    }

    pub fn at(&self, x: usize, xhat: usize) -> T {
        self.rows[x][xhat]
    }

    pub fn max_value(&self) -> T {
        self.rows.iter().flatten().fold(T::zero(), |m, &d| m.max(d))
    }

    /// E[d(source, recon)] under `p`.
    pub fn expected(&self, p: &JointPmf<T>, source: &str, recon: &str) -> Result<T> {
        let m = p.marginal(&[source, recon])?;
        let shape = m.shape();
        if shape[0] != self.source_size() || shape[1] != self.recon_size() {
            return Err(Error::Usage(format!(
                "distortion matrix is {}x{} but ({source},{recon}) is {}x{}",
                self.source_size(),
                self.recon_size(),
                shape[0],
                shape[1]
            )));
        }
        let mut e = T::zero();
        for x in 0..shape[0] {
            for y in 0..shape[1] {
                e = e + m.prob(&[x, y]) * self.at(x, y);
            }
        }
        Ok(e)
    }
}

/// Distortion measures and budgets of both decoders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionSpec<T> {
    pub d1: DistortionMatrix<T>,
    pub d2: DistortionMatrix<T>,
    pub budget1: T,
    pub budget2: T,
}

impl<T: Real> DistortionSpec<T> {
    pub fn new(d1: DistortionMatrix<T>, d2: DistortionMatrix<T>, budget1: T, budget2: T) -> Result<Self> {
        if d1.source_size() != d2.source_size() {
            return Err(Error::Config("distortion matrices disagree on the source alphabet".into()));
        }
        if !(budget1 >= T::zero() && budget2 >= T::zero()) {
            return Err(Error::Config("distortion budgets must be nonnegative".into()));
        }
        Ok(Self { d1, d2, budget1, budget2 })
    }

    pub fn hamming(n: usize, budget1: T, budget2: T) -> Result<Self> {
        Self::new(DistortionMatrix::hamming(n), DistortionMatrix::hamming(n), budget1, budget2)
    }

    /// (E d1(X, Xh1), E d2(X, Xh2)) using the standard variable names.
    pub fn expected(&self, p: &JointPmf<T>) -> Result<(T, T)> {
        use super::names::{RECON1, RECON2, SOURCE};
        Ok((self.d1.expected(p, SOURCE, RECON1)?, self.d2.expected(p, SOURCE, RECON2)?))
    }

    pub fn satisfied_by(&self, p: &JointPmf<T>) -> Result<bool> {
        let (e1, e2) = self.expected(p)?;
        let tol = T::tolerance();
        Ok(e1 <= self.budget1 + tol && e2 <= self.budget2 + tol)
    }
}
