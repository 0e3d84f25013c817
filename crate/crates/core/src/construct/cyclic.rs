//! Optimal constructions with `F = K` rows (or `K/g` after grouping).
//!
//! Cache `k` stores the `t` rows `(k-1)t+1, ..., kt` (cyclically), so user
//! `k` holds `rt` consecutive rows. Reordering the columns by a permutation
//! makes every column's stars start at its own index, which is the layout
//! the integer placement rules are written in.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::array::{CachingArray, DeliveryArray, Entry};
use crate::cyclic::{gcd, wrap};
use crate::error::{Error, Result};
use crate::params::NetworkParams;

/// Column reordering under which user columns have consecutive stars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnPermutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl ColumnPermutation {
    /// Original column placed at reordered position `j`.
    pub fn apply(&self, j: usize) -> usize {
        self.forward[j - 1]
    }

    /// Reordered position of original column `k`.
    pub fn invert(&self, k: usize) -> usize {
        self.inverse[k - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.forward
    }
}

/// Which row the second half of an odd-layer integer goes to. The two
/// candidates differ by `rt`; the verifier decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondRowReading {
    /// Row `((p+1)/2)(rt+L) + q`.
    Primary,
    /// Row `((p+1)/2)(rt+L) + rt + q`.
    Alternate,
}

impl fmt::Display for SecondRowReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SecondRowReading::Primary => "primary",
            SecondRowReading::Alternate => "alternate (+rt)",
        })
    }
}

/// Users split into `g = gcd(K, t, L)` groups of `K/g` consecutive indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupStructure {
    pub gamma: usize,
    pub groups: Vec<Vec<usize>>,
}

impl GroupStructure {
    pub fn new(params: &NetworkParams) -> Self {
        let gamma = params.gamma();
        let size = params.k / gamma;
        let groups = (0..gamma).map(|i| (1..=size).map(|u| i * size + u).collect()).collect();
        GroupStructure { gamma, groups }
    }
}

/// `K x K` caching array, column `k` starred on rows `(k-1)t+1 ..= kt`.
pub fn build_caching_array_cyclic(params: &NetworkParams) -> Result<CachingArray> {
    params.require_caching()?;
    let (k, t) = (params.k, params.t);
    if params.rt() >= k {
        return Err(Error::Domain(format!("needs rt < K, got rt = {} and K = {k}", params.rt())));
    }
    let mut stars = vec![false; k * k];
    for col in 1..=k {
        for o in 0..t {
            let row = wrap(((col - 1) * t + 1 + o) as i64, k);
            stars[(row - 1) * k + col - 1] = true;
        }
    }
    CachingArray::new(k, k, params.r, stars)
}

/// `forward[j]` is the unique `k` with `(k-1)t + 1 = j (mod K)`.
pub fn pi_permutation(params: &NetworkParams) -> Result<ColumnPermutation> {
    let (k, t) = (params.k, params.t);
    if gcd(k as u64, t as u64) != 1 {
        return Err(Error::Domain(format!("gcd(K, t) = gcd({k}, {t}) != 1, no such permutation")));
    }
    let mut forward = vec![0; k];
    for col in 1..=k {
        forward[wrap(((col - 1) * t + 1) as i64, k) - 1] = col;
    }
    let mut inverse = vec![0; k];
    for (j, &col) in forward.iter().enumerate() {
        inverse[col - 1] = j + 1;
    }
    Ok(ColumnPermutation { forward, inverse })
}

fn require_coprime(params: &NetworkParams) -> Result<()> {
    if gcd(params.k as u64, params.t as u64) != 1 {
        return Err(Error::Domain(format!(
            "needs gcd(K, t) = 1, got gcd({}, {}) = {}; see the grouped variant",
            params.k,
            params.t,
            gcd(params.k as u64, params.t as u64)
        )));
    }
    Ok(())
}

/// The `m` with `K = m*rt + (m-1)L`, if any, with `m >= 2`.
pub fn layer_count(params: &NetworkParams) -> Option<usize> {
    let period = params.rt() + params.l;
    ((params.k + params.l) % period == 0)
        .then_some((params.k + params.l) / period)
        .filter(|&m| m >= 2)
}

/// Writes integers given in reordered coordinates into a delivery array on
/// `c`, refusing to overwrite stars or earlier integers.
fn fill(c: CachingArray, params: &NetworkParams, s: u32, placements: &[(u32, usize, usize)]) -> Result<DeliveryArray> {
    let perm = pi_permutation(params)?;
    let k = params.k;
    let mask = c.user_mask();
    let mut cells: Vec<Option<Entry>> = mask.iter().map(|&m| m.then_some(Entry::Star)).collect();
    for &(value, row, reordered) in placements {
        let col = perm.apply(reordered);
        let cell = &mut cells[(row - 1) * k + col - 1];
        if let Some(prev) = cell {
            return Err(Error::Domain(format!(
                "integer {value} collides with {prev} at cell ({row},{col})"
            )));
        }
        *cell = Some(Entry::Int(value));
    }
    let mut out = Vec::with_capacity(cells.len());
    for (idx, cell) in cells.into_iter().enumerate() {
        match cell {
            Some(e) => out.push(e),
            None => {
                return Err(Error::Domain(format!(
                    "cell ({},{}) left empty",
                    idx / k + 1,
                    idx % k + 1
                )))
            }
        }
    }
    DeliveryArray::new(Arc::new(c), params.l, s, out)
}

/// Case `K = rt + L`: integer `s` in `[1, L]` sits once in every column,
/// at reordered cell `(rt + s + j - 1, j)`.
pub fn build_delivery_array_case_a(params: &NetworkParams) -> Result<DeliveryArray> {
    params.require_caching()?;
    if params.k != params.rt() + params.l {
        return Err(Error::Domain(format!(
            "needs K = rt + L, got K = {} and rt + L = {}",
            params.k,
            params.rt() + params.l
        )));
    }
    require_coprime(params)?;
    let c = build_caching_array_cyclic(params)?;
    let (k, rt) = (params.k, params.rt());
    let mut placements = Vec::with_capacity(k * params.l);
    for j in 1..=k {
        for s in 1..=params.l {
            placements.push((s as u32, wrap((rt + s + j - 1) as i64, k), j));
        }
    }
    fill(c, params, params.l as u32, &placements)
}

/// Case `K = m*rt + (m-1)L` with `L >= rt`: `(m-1)K` integers, each on
/// `rt + L` cells split over two rows.
pub fn build_delivery_array_case_b(params: &NetworkParams) -> Result<DeliveryArray> {
    build_delivery_array_case_b_reported(params).map(|(d, _)| d)
}

/// As [`build_delivery_array_case_b`], also reporting which second-row
/// reading produced a verified array.
pub fn build_delivery_array_case_b_reported(params: &NetworkParams) -> Result<(DeliveryArray, SecondRowReading)> {
    params.require_caching()?;
    let Some(m) = layer_count(params) else {
        return Err(Error::Domain(format!(
            "needs K = m*rt + (m-1)L with m >= 2, got K = {}, rt = {}, L = {}",
            params.k,
            params.rt(),
            params.l
        )));
    };
    if params.l < params.rt() {
        return Err(Error::Domain(format!("needs L >= rt, got L = {} < rt = {}", params.l, params.rt())));
    }
    require_coprime(params)?;
    match case_b_with(params, m, SecondRowReading::Primary) {
        Ok(d) => Ok((d, SecondRowReading::Primary)),
        Err(first) => case_b_with(params, m, SecondRowReading::Alternate)
            .map(|d| (d, SecondRowReading::Alternate))
            .map_err(|_| first),
    }
}

fn case_b_with(params: &NetworkParams, m: usize, reading: SecondRowReading) -> Result<DeliveryArray> {
    let c = build_caching_array_cyclic(params)?;
    let (k, rt, l) = (params.k as i64, params.rt() as i64, params.l as i64);
    let period = rt + l;
    let at = |v: i64| wrap(v, k as usize);
    let mut placements = Vec::new();
    for p in 0..(m as i64 - 1) {
        for q in 1..=k {
            let s = (p * k + q) as u32;
            if p % 2 == 0 {
                let h = p / 2;
                for i in 1..=l {
                    placements.push((s, at(q), at(h * period + q + i)));
                }
                for i in 1..=rt {
                    placements.push((s, at(h * period + rt + q), at(q - rt + i)));
                }
            } else {
                let h = (p - 1) / 2;
                for i in 1..=rt {
                    placements.push((s, at(q), at(h * period + l + q + i)));
                }
                let second = match reading {
                    SecondRowReading::Primary => (h + 1) * period + q,
                    SecondRowReading::Alternate => (h + 1) * period + rt + q,
                };
                for i in 1..=l {
                    placements.push((s, at(second), at(q - rt + i)));
                }
            }
        }
    }
    fill(c, params, ((m - 1) * params.k) as u32, &placements)
}

/// Variant for `g = gcd(K, t, L) > 1`: the case (a) or (b) arrays for
/// `(K/g, r, t/g, L/g)`, repeated `g` times side by side. `F = K/g`.
pub fn build_grouped_arrays(params: &NetworkParams) -> Result<(CachingArray, DeliveryArray)> {
    params.require_caching()?;
    let g = params.gamma();
    if g == 1 {
        return Err(Error::Domain(
            "gcd(K, t, L) = 1; use the case (a) or case (b) builders directly".into(),
        ));
    }
    let reduced = NetworkParams::with_files(params.k / g, params.r, params.t / g, params.l / g, params.n)?;
    let base = if reduced.k == reduced.rt() + reduced.l {
        build_delivery_array_case_a(&reduced)?
    } else {
        build_delivery_array_case_b(&reduced)?
    };
    let d = base.hconcat(g)?;
    Ok((d.caching().clone(), d))
}
