//! Closed-form delivery time and subpacketization of the constructions in
//! this crate and of two published baselines, for tables and sweeps.
//!
//! Baselines:
//! * `cwlzc`: single-antenna cyclic scheme, NDT `(K-rt)/(t+1)`,
//!   `F = K * C(K - t(r-1), t)`.
//! * `cbwc`: multi-antenna scheme for `r > L` with `K = (r-1)K' + t`,
//!   NDT `(K-rt)/(L(t+1))`, `F = K*L*C(K',t) / gcd(L, r-1)`.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::construct::cyclic::layer_count;
use crate::cyclic::{binomial, binomial_signed, gcd};
use crate::error::{Error, Result};
use crate::params::NetworkParams;
use crate::rational::Rational;

/// Scheme names in catalog order.
pub const SCHEMES: [&str; 11] = [
    "construction-I",
    "construction-I-reduced",
    "construction-II",
    "construction-II-grouped",
    "construction-III",
    "construction-III-grouped",
    "construction-IV",
    "antenna-slack",
    "cwlzc",
    "cbwc",
    "trivial",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogRow {
    pub scheme: &'static str,
    pub applicable: bool,
    pub ndt: Option<Rational>,
    pub f: Option<u64>,
}

/// Whether `scheme` applies at `params`, and its `(NDT, F)` if so.
pub fn evaluate(scheme: &str, params: &NetworkParams) -> Result<Option<(Rational, u64)>> {
    let (k, r, t, l) = (params.k, params.r, params.t, params.l);
    let (ki, rt) = (k as i64, params.rt() as i64);
    let frac = |p: i64, q: i64| Rational::new(p, q);
    let g = params.gamma();
    let coprime = |a: usize, b: usize| gcd(a as u64, b as u64) == 1;
    let out = match scheme {
        "construction-I" => {
            if t == 0 || k < r * (t + l) {
                return Ok(None);
            }
            (frac(ki - rt, (t + l) as i64)?, crate::construct::general::subpacketization(params))
        }
        "construction-I-reduced" => {
            if t == 0 || g == 1 || k < r * (t + l) {
                return Ok(None);
            }
            let reduced = NetworkParams::new(k / g, r, t / g, l / g)?;
            (frac(ki - rt, (t + l) as i64)?, crate::construct::general::subpacketization(&reduced))
        }
        "construction-II" => {
            if t == 0 || k != r * t + l || !coprime(k, t) {
                return Ok(None);
            }
            (frac(l as i64, ki)?, k as u64)
        }
        "construction-II-grouped" => {
            if t == 0 || g == 1 || k != r * t + l || !coprime(k / g, t / g) {
                return Ok(None);
            }
            (frac(l as i64, ki)?, (k / g) as u64)
        }
        "construction-III" => match layer_count(params) {
            Some(m) if t > 0 && l >= r * t && coprime(k, t) => (Rational::from_integer(m as i64 - 1), k as u64),
            _ => return Ok(None),
        },
        "construction-III-grouped" => match layer_count(params) {
            Some(m) if t > 0 && g > 1 && l >= r * t && coprime(k / g, t / g) => {
                (Rational::from_integer(m as i64 - 1), (k / g) as u64)
            }
            _ => return Ok(None),
        },
        "construction-IV" => {
            if t == 0 || k % r != 0 || l % r != 0 || k / r < t + l / r {
                return Ok(None);
            }
            let (kp, lp) = (k / r, l / r);
            (frac(ki - rt, rt + l as i64)?, (r * (t + lp)) as u64 * binomial(kp as u64, (t + lp) as u64))
        }
        "antenna-slack" => {
            let (kp, lp, ell) = (k / r, l / r, l % r);
            if t == 0 || k % r != 0 || ell == 0 || lp == 0 || kp < t + lp {
                return Ok(None);
            }
            (frac(ki - rt, rt + (l - ell) as i64)?, (r * (t + lp)) as u64 * binomial(kp as u64, (t + lp) as u64))
        }
        "cwlzc" => {
            if l != 1 || t == 0 {
                return Ok(None);
            }
            (frac(ki - rt, t as i64 + 1)?, k as u64 * binomial_signed(ki - (t * (r - 1)) as i64, t as i64))
        }
        "cbwc" => {
            if r <= l || t == 0 || (k - t) % (r - 1) != 0 || (k - t) / (r - 1) < t + 1 {
                return Ok(None);
            }
            let kp = ((k - t) / (r - 1)) as u64;
            let f = k as u64 * l as u64 * binomial(kp, t as u64) / gcd(l as u64, r as u64 - 1);
            (frac(ki - rt, (l * (t + 1)) as i64)?, f)
        }
        "trivial" => {
            if t == 0 {
                (frac(ki, l as i64)?, 1)
            } else if r * t == k {
                (Rational::zero(), 1)
            } else {
                return Ok(None);
            }
        }
        other => return Err(Error::InvalidParameter(format!("unknown scheme {other:?}"))),
    };
    Ok(Some(out))
}

/// Every scheme at `params`; inapplicable ones are marked, not filled.
pub fn evaluate_catalog(params: &NetworkParams) -> Vec<CatalogRow> {
    SCHEMES
        .iter()
        .map(|&scheme| match evaluate(scheme, params).ok().flatten() {
            Some((ndt, f)) => CatalogRow {
                scheme,
                applicable: true,
                ndt: Some(ndt),
                f: Some(f),
            },
            None => CatalogRow {
                scheme,
                applicable: false,
                ndt: None,
                f: None,
            },
        })
        .collect()
}

/// Parameter ranges for a sweep; invalid combinations are skipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRanges {
    pub k: RangeInclusive<usize>,
    pub r: RangeInclusive<usize>,
    pub t: RangeInclusive<usize>,
    pub l: RangeInclusive<usize>,
}

impl SweepRanges {
    pub fn point(params: &NetworkParams) -> Self {
        SweepRanges {
            k: params.k..=params.k,
            r: params.r..=params.r,
            t: params.t..=params.t,
            l: params.l..=params.l,
        }
    }
}

/// `K = 25, r = 3, L = 1`, every feasible `t`.
pub fn subpacketization_preset() -> SweepRanges {
    SweepRanges {
        k: 25..=25,
        r: 3..=3,
        t: 0..=8,
        l: 1..=1,
    }
}

/// `K = 30, L = 3, r = 1..3`, every feasible `t`.
pub fn ndt_preset() -> SweepRanges {
    SweepRanges {
        k: 30..=30,
        r: 1..=3,
        t: 0..=30,
        l: 3..=3,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub r: usize,
    pub t: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub scheme: &'static str,
    pub ndt: Rational,
    pub ndt_decimal: String,
    #[serde(rename = "F")]
    pub f: u64,
}

/// Applicable catalog rows at every valid point, ordered by
/// `(K, r, t, L)` and then catalog order.
pub fn sweep(ranges: &SweepRanges) -> Vec<SweepRow> {
    let mut out = Vec::new();
    for k in ranges.k.clone() {
        for r in ranges.r.clone() {
            for t in ranges.t.clone() {
                for l in ranges.l.clone() {
                    let Ok(params) = NetworkParams::new(k, r, t, l) else {
                        continue;
                    };
                    for row in evaluate_catalog(&params) {
                        if let (Some(ndt), Some(f)) = (row.ndt, row.f) {
                            out.push(SweepRow {
                                k,
                                r,
                                t,
                                l,
                                scheme: row.scheme,
                                ndt,
                                ndt_decimal: format!("{:.6}", ndt.to_f64()),
                                f,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// CSV with header `K,r,t,L,scheme,ndt,ndt_decimal,F`.
pub fn to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        writer
            .write_record(["K", "r", "t", "L", "scheme", "ndt", "ndt_decimal", "F"])
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    for row in rows {
        writer.serialize(row).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Aligned text table of a catalog.
pub fn catalog_table(params: &NetworkParams, rows: &[CatalogRow]) -> String {
    let mut out = format!("K={} r={} t={} L={}\n", params.k, params.r, params.t, params.l);
    let _ = writeln!(out, "{:<26} {:>10} {:>12} {:>14}", "scheme", "NDT", "decimal", "F");
    for row in rows {
        match (row.ndt, row.f) {
            (Some(ndt), Some(f)) => {
                let _ = writeln!(out, "{:<26} {:>10} {:>12.6} {:>14}", row.scheme, ndt.to_string(), ndt.to_f64(), f);
            }
            _ => {
                let _ = writeln!(out, "{:<26} {:>10} {:>12} {:>14}", row.scheme, "n/a", "", "");
            }
        }
    }
    out
}
