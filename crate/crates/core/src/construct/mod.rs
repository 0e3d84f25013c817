//! Array constructions.
//!
//! * [`general`]: any `K >= r(t+L)`, delivery time `(K-rt)/(t+L)`.
//! * [`cyclic`]: `K = rt+L` or `K = m*rt + (m-1)L`, optimal delivery time.
//! * [`lift`]: turns an EPDA for `K/r` users into a scheme for `K` users.

pub mod cyclic;
pub mod general;
pub mod lift;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::array::{CachingArray, DeliveryArray, Epda};
use crate::compare;
use crate::error::{Error, Result};
use crate::params::NetworkParams;
use crate::rational::Rational;
use crate::verify::{self, SchemeMetrics};

/// Which construction to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConstructionId {
    /// [`general`]: any `K >= r(t+L)`.
    General,
    /// [`cyclic`] with `K = rt + L`.
    Cyclic,
    /// [`cyclic`] with `K = m*rt + (m-1)L`.
    Layered,
    /// [`lift`] of an EPDA.
    Lift,
}

impl ConstructionId {
    pub fn number(self) -> u8 {
        match self {
            ConstructionId::General => 1,
            ConstructionId::Cyclic => 2,
            ConstructionId::Layered => 3,
            ConstructionId::Lift => 4,
        }
    }
}

impl fmt::Display for ConstructionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for ConstructionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(ConstructionId::General),
            "2" => Ok(ConstructionId::Cyclic),
            "3" => Ok(ConstructionId::Layered),
            "4" => Ok(ConstructionId::Lift),
            other => Err(Error::InvalidParameter(format!("construction must be 1-4, got {other:?}"))),
        }
    }
}

/// Extra inputs some constructions take.
#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    /// Shrink the general construction by `gcd(K, t, L)` when possible.
    pub gcd_reduce: bool,
    /// Layer count the layered construction must have.
    pub layers: Option<usize>,
    /// EPDA to lift instead of the built-in source.
    pub epda: Option<Epda>,
}

/// A verified caching/delivery pair with the parameters it runs under.
#[derive(Clone, Debug)]
pub struct Scheme {
    pub construction: ConstructionId,
    /// Catalog name of the variant that was built.
    pub variant: &'static str,
    pub params: NetworkParams,
    pub delivery: DeliveryArray,
    /// Choices made while building, e.g. which reading verified.
    pub notes: Vec<String>,
}

impl Scheme {
    pub fn caching(&self) -> &CachingArray {
        self.delivery.caching()
    }

    pub fn metrics(&self) -> Result<SchemeMetrics> {
        verify::metrics(self.caching(), &self.delivery, &self.params)
    }
}

/// Builds with an explicit construction, picking the grouped or reduced
/// variant where the parameters call for it.
pub fn build(id: ConstructionId, params: &NetworkParams, options: &BuildOptions) -> Result<Scheme> {
    let mut notes = Vec::new();
    let scheme = |variant, delivery, notes| Scheme {
        construction: id,
        variant,
        params: *params,
        delivery,
        notes,
    };
    match id {
        ConstructionId::General => {
            if options.gcd_reduce && params.gamma() > 1 {
                let (_, d) = general::gcd_reduced_arrays(params)?;
                Ok(scheme("construction-I-reduced", d, notes))
            } else {
                if options.gcd_reduce {
                    notes.push("gcd(K, t, L) = 1, built without reduction".into());
                }
                let c = general::build_caching_array_i(params)?;
                let d = general::build_delivery_array_i(&c, params)?;
                Ok(scheme("construction-I", d, notes))
            }
        }
        ConstructionId::Cyclic => {
            if params.gamma() > 1 && cyclic::pi_permutation(params).is_err() {
                let (_, d) = cyclic::build_grouped_arrays(params)?;
                Ok(scheme("construction-II-grouped", d, notes))
            } else {
                Ok(scheme("construction-II", cyclic::build_delivery_array_case_a(params)?, notes))
            }
        }
        ConstructionId::Layered => {
            let m = cyclic::layer_count(params);
            if let (Some(want), Some(got)) = (options.layers, m) {
                if want != got {
                    return Err(Error::Domain(format!("parameters give m = {got}, not {want}")));
                }
            }
            if params.gamma() > 1 && cyclic::pi_permutation(params).is_err() {
                let (_, d) = cyclic::build_grouped_arrays(params)?;
                Ok(scheme("construction-III-grouped", d, notes))
            } else {
                let (d, reading) = cyclic::build_delivery_array_case_b_reported(params)?;
                notes.push(format!("second-row reading: {reading}"));
                Ok(scheme("construction-III", d, notes))
            }
        }
        ConstructionId::Lift => {
            let r = params.r;
            if params.k % r != 0 {
                return Err(Error::Domain(format!("needs r | K, got K = {}, r = {r}", params.k)));
            }
            let (lp, ell) = (params.l / r, params.l % r);
            let a = match &options.epda {
                Some(a) => {
                    if a.k() * r != params.k {
                        return Err(Error::Domain(format!(
                            "EPDA has {} columns; K = {} needs {}",
                            a.k(),
                            params.k,
                            params.k / r
                        )));
                    }
                    if a.l() != lp {
                        return Err(Error::Domain(format!(
                            "EPDA is built for {} antennas; L = {} needs {lp}",
                            a.l(),
                            params.l
                        )));
                    }
                    if a.k() * a.z() != params.t * a.f() {
                        return Err(Error::Domain(format!(
                            "EPDA memory K'Z'/F' = {}/{} does not equal t = {}",
                            a.k() * a.z(),
                            a.f(),
                            params.t
                        )));
                    }
                    a.clone()
                }
                None => {
                    if lp == 0 {
                        return Err(Error::Domain(format!("needs L >= r, got L = {}, r = {r}", params.l)));
                    }
                    lift::epda_source(params.k / r, params.t, lp)?
                }
            };
            let c = lift::lift_caching(&a, r)?;
            let (d, stride) = lift::lift_delivery_reported(&a, &c, r)?;
            notes.push(format!("delivery blocks: {stride}"));
            if ell > 0 {
                notes.push(format!("{ell} antenna(s) beyond r*L' = {} left idle", r * lp));
                Ok(scheme("antenna-slack", d, notes))
            } else {
                Ok(scheme("construction-IV", d, notes))
            }
        }
    }
}

/// Picks the construction with the smallest closed-form delivery time,
/// then the fewest rows, and builds it.
pub fn build_auto(params: &NetworkParams, options: &BuildOptions) -> Result<Scheme> {
    let candidates = [
        ("construction-II", ConstructionId::Cyclic, false),
        ("construction-II-grouped", ConstructionId::Cyclic, false),
        ("construction-III", ConstructionId::Layered, false),
        ("construction-III-grouped", ConstructionId::Layered, false),
        ("construction-IV", ConstructionId::Lift, false),
        ("antenna-slack", ConstructionId::Lift, false),
        ("construction-I-reduced", ConstructionId::General, true),
        ("construction-I", ConstructionId::General, false),
    ];
    let mut best: Option<((Rational, u64), ConstructionId, bool)> = None;
    for (name, id, reduce) in candidates {
        if let Some(value) = compare::evaluate(name, params)? {
            let better = match &best {
                None => true,
                Some((b, _, _)) => value.0 < b.0 || (value.0 == b.0 && value.1 < b.1),
            };
            if better {
                best = Some((value, id, reduce));
            }
        }
    }
    let Some((_, id, reduce)) = best else {
        return Err(Error::Domain(format!(
            "no construction applies at K={}, r={}, t={}, L={}",
            params.k, params.r, params.t, params.l
        )));
    };
    let options = BuildOptions {
        gcd_reduce: reduce || options.gcd_reduce,
        ..options.clone()
    };
    build(id, params, &options)
}
