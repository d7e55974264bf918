use crate::error::{Error, Result};

/// Resource bounds shared by every layer.
///
/// Exceeding a bound is reported as [`Error::ResourceLimit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest diagram width handled by the exact algebra.
    pub max_width: usize,
    /// Largest number of stored terms in one algebra element.
    pub max_terms: usize,
    /// Largest Hilbert-space dimension `n^k` for operators on `H^{⊗k}`.
    pub max_dim: usize,
    /// Largest dimension for which a full dense matrix on `H^{⊗k}` is formed.
    pub max_dense_dim: usize,
    /// Largest number of creation-operator words enumerated at one level.
    pub max_words: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_width: 6, max_terms: 1_000_000, max_dim: 4096, max_dense_dim: 1024, max_words: 2048 }
    }
}

impl Limits {
    pub fn check_width(&self, width: usize) -> Result<()> {
        if width > self.max_width {
            return Err(Error::ResourceLimit { what: "width", value: width, limit: self.max_width });
        }
        Ok(())
    }

    pub fn check_terms(&self, terms: usize) -> Result<()> {
        if terms > self.max_terms {
            return Err(Error::ResourceLimit { what: "terms", value: terms, limit: self.max_terms });
        }
        Ok(())
    }

    /// Checks `n^k` against `max_dim`, returning the dimension.
    pub fn check_dim(&self, n: usize, k: usize) -> Result<usize> {
        let dim = checked_pow(n, k).filter(|d| *d <= self.max_dim);
        dim.ok_or(Error::ResourceLimit {
            what: "n^k",
            value: checked_pow(n, k).unwrap_or(usize::MAX),
            limit: self.max_dim,
        })
    }

    pub fn check_dense(&self, dim: usize) -> Result<()> {
        if dim > self.max_dense_dim {
            return Err(Error::ResourceLimit { what: "dense dimension", value: dim, limit: self.max_dense_dim });
        }
        Ok(())
    }
}

pub(crate) fn checked_pow(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..k {
        acc = acc.checked_mul(n)?;
    }
    Some(acc)
}
