use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Network parameters: `k` users and caches, each user reading `r`
/// consecutive caches, integer cache fraction `t = KM/N`, `l` transmit
/// antennas and `n` files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkParams {
    pub k: usize,
    pub r: usize,
    pub t: usize,
    pub l: usize,
    pub n: usize,
}

impl NetworkParams {
    /// Validated parameters with `N = K`. `t = 0` is accepted here; the
    /// constructions reject it themselves.
    pub fn new(k: usize, r: usize, t: usize, l: usize) -> Result<Self> {
        Self::with_files(k, r, t, l, k)
    }

    pub fn with_files(k: usize, r: usize, t: usize, l: usize, n: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("K must be at least 2, got {k}")));
        }
        if r < 1 || r >= k {
            return Err(Error::InvalidParameter(format!("need 1 <= r < K, got r={r}, K={k}")));
        }
        if r * t > k {
            return Err(Error::InvalidParameter(format!("need r*t <= K, got r*t={}, K={k}", r * t)));
        }
        if l < 1 {
            return Err(Error::InvalidParameter("L must be at least 1".into()));
        }
        if n < 1 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        Ok(NetworkParams { k, r, t, l, n })
    }

    /// `r*t`, the number of stars per delivery-array column.
    pub fn rt(&self) -> usize {
        self.r * self.t
    }

    /// `gcd(K, t, L)`.
    pub fn gamma(&self) -> usize {
        crate::gcd(crate::gcd(self.k as u64, self.t as u64), self.l as u64) as usize
    }

    pub(crate) fn require_caching(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::Domain("t = 0 stores nothing; no caching array to build".into()));
        }
        Ok(())
    }
}

/// A demand vector `d_1, ..., d_K` over files `1..=N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(demands: Vec<usize>, k: usize, n: usize) -> Result<Self> {
        if demands.len() != k {
            return Err(Error::InvalidParameter(format!(
                "demand vector has {} entries, expected K = {k}",
                demands.len()
            )));
        }
        if let Some(bad) = demands.iter().find(|&&d| d == 0 || d > n) {
            return Err(Error::InvalidParameter(format!("demand {bad} outside [1, {n}]")));
        }
        Ok(DemandVector(demands))
    }

    /// `d = (1, 2, ..., K)`; needs `N >= K`.
    pub fn distinct(k: usize, n: usize) -> Result<Self> {
        if n < k {
            return Err(Error::InvalidParameter(format!("distinct demands need N >= K ({n} < {k})")));
        }
        Self::new((1..=k).collect(), k, n)
    }

    pub fn uniform(file: usize, k: usize, n: usize) -> Result<Self> {
        Self::new(vec![file; k], k, n)
    }

    /// Demand of user `k` (1-based).
    pub fn of(&self, user: usize) -> usize {
        self.0[user - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}
