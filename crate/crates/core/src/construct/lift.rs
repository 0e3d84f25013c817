//! Lifting an EPDA for `K'` users with `L'` antennas to a scheme for
//! `K = rK'` users with `L = rL'` antennas, each reading `r` caches.
//!
//! The caching array stacks `r` blocks. Block 0 puts the star pattern of
//! EPDA column `k` at column `kr`; block `i` is block 0 shifted right by `i`
//! columns. The delivery array stacks matching blocks: block 0 repeats
//! every EPDA column `r` times, block `i` is that shifted right and with
//! `i*S'` added to each integer.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::array::{CachingArray, DeliveryArray, Entry, Epda};
use crate::construct::general::{build_caching_array_i, build_delivery_array_i};
use crate::cyclic::wrap;
use crate::error::{Error, Result};
use crate::format::{self, Document};
use crate::params::NetworkParams;
use crate::verify::{self, SchemeMetrics};

/// Column shift applied to delivery block `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftStride {
    /// `i` columns, matching the caching blocks.
    Unit,
    /// `i*r` columns.
    Block,
}

impl fmt::Display for ShiftStride {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftStride::Unit => "shift by i",
            ShiftStride::Block => "shift by i*r",
        })
    }
}

/// The dedicated-cache EPDA for `kp` users, memory `t`, `lp` antennas:
/// the general construction with single-cache access. It is
/// `(t+lp)`-regular.
pub fn epda_source(kp: usize, t: usize, lp: usize) -> Result<Epda> {
    if t == 0 || kp < t + lp {
        return Err(Error::Domain(format!("needs t >= 1 and K' >= t + L', got K'={kp}, t={t}, L'={lp}")));
    }
    let params = NetworkParams::new(kp, 1, t, lp)?;
    let c = build_caching_array_i(&params)?;
    let d = build_delivery_array_i(&c, &params)?;
    Epda::new(d.k(), d.f(), d.z(), d.l(), d.s(), d.cells().to_vec())
}

/// Reads and fully validates an EPDA document.
pub fn load_epda(text: &str) -> Result<Epda> {
    match format::deserialize(text)? {
        Document::Epda(a) => Ok(a),
        other => Err(Error::parse(1, format!("expected an epda document, found {}", other.kind()))),
    }
}

/// `rF' x rK'` caching array with `Z'` stars per column.
pub fn lift_caching(a: &Epda, r: usize) -> Result<CachingArray> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let (kp, fp) = (a.k(), a.f());
    let k = r * kp;
    let mut stars = vec![false; r * fp * k];
    for i in 0..r {
        for j in 1..=fp {
            let row = i * fp + j;
            for col in 1..=kp {
                if a.get(j, col).is_star() {
                    let at = wrap((col * r + i) as i64, k);
                    stars[(row - 1) * k + at - 1] = true;
                }
            }
        }
    }
    CachingArray::new(k, r * fp, r, stars)
}

/// Delivery array on `c = lift_caching(a, r)` with `S = rS'`, `L = rL'`.
pub fn lift_delivery(a: &Epda, c: &CachingArray, r: usize) -> Result<DeliveryArray> {
    lift_delivery_reported(a, c, r).map(|(d, _)| d)
}

/// As [`lift_delivery`], also reporting the block shift that verified.
/// The unit shift is tried first.
pub fn lift_delivery_reported(a: &Epda, c: &CachingArray, r: usize) -> Result<(DeliveryArray, ShiftStride)> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    if (c.k(), c.f(), c.r()) != (r * a.k(), r * a.f(), r) {
        return Err(Error::DimensionMismatch(format!(
            "caching array is {} x {} with r={}, expected {} x {} with r={r}",
            c.f(),
            c.k(),
            c.r(),
            r * a.f(),
            r * a.k()
        )));
    }
    match lift_with(a, c, r, ShiftStride::Unit) {
        Ok(d) => Ok((d, ShiftStride::Unit)),
        Err(first) => lift_with(a, c, r, ShiftStride::Block)
            .map(|d| (d, ShiftStride::Block))
            .map_err(|_| first),
    }
}

fn lift_with(a: &Epda, c: &CachingArray, r: usize, stride: ShiftStride) -> Result<DeliveryArray> {
    let (kp, fp, sp) = (a.k(), a.f(), a.s());
    let k = r * kp;
    let mut cells = Vec::with_capacity(r * fp * k);
    for i in 0..r {
        let shift = match stride {
            ShiftStride::Unit => i,
            ShiftStride::Block => i * r,
        };
        for j in 1..=fp {
            for col in 1..=k {
                let source = wrap(col as i64 - shift as i64, k);
                cells.push(match a.get(j, source.div_ceil(r)) {
                    Entry::Star => Entry::Star,
                    Entry::Int(s) => Entry::Int(s + i as u32 * sp),
                });
            }
        }
    }
    DeliveryArray::new(Arc::new(c.clone()), r * a.l(), r as u32 * sp, cells)
}

/// Metrics of a lifted scheme run with `L = rL' + ell` antennas, `ell < r`.
/// The array needs only `rL'` of them, so the delivery time is unchanged.
pub fn antenna_slack(d: &DeliveryArray, ell: usize) -> Result<SchemeMetrics> {
    let r = d.r();
    if ell >= r {
        return Err(Error::InvalidParameter(format!("needs ell < r, got ell={ell}, r={r}")));
    }
    let (k, z, f) = (d.k(), d.z(), d.f());
    if (k * z) % f != 0 {
        return Err(Error::Domain(format!("K*Z/F = {}/{f} is not an integer memory size", k * z)));
    }
    let params = NetworkParams::new(k, r, k * z / f, d.l() + ell)?;
    verify::metrics(d.caching(), d, &params)
}
