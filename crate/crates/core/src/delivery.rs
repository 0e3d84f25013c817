//! Placement, transmission scheduling, and decodability checks.
//!
//! Each integer `s` of a delivery array is one channel use. Every cell
//! holding `s` is a participant: the column's user wants the row's subfile
//! of its demanded file. The server zero-forces each participant's stream
//! at the other participants that do not hold that subfile (its null set);
//! everyone else removes it using cached content.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::array::{CachingArray, DeliveryArray};
use crate::error::{Error, Result};
use crate::params::DemandVector;
use crate::rational::Rational;

/// Rows held by each cache and by each user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlacementMap {
    /// `cache_rows[i-1]`: rows stored in cache `i`.
    pub cache_rows: Vec<Vec<usize>>,
    /// `user_rows[k-1]`: rows readable by user `k` from its `r` caches.
    pub user_rows: Vec<Vec<usize>>,
}

impl PlacementMap {
    pub fn cache(&self, i: usize) -> &[usize] {
        &self.cache_rows[i - 1]
    }

    pub fn user(&self, k: usize) -> &[usize] {
        &self.user_rows[k - 1]
    }
}

pub fn placement(c: &CachingArray) -> Result<PlacementMap> {
    c.validate()?;
    let k = c.k();
    let cache_rows: Vec<Vec<usize>> = (1..=k).map(|i| c.column_rows(i)).collect();
    let mask = c.user_mask();
    let user_rows = (1..=k)
        .map(|u| (1..=c.f()).filter(|&j| mask[(j - 1) * k + u - 1]).collect())
        .collect();
    Ok(PlacementMap { cache_rows, user_rows })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Participant {
    pub user: usize,
    pub row: usize,
    pub file: usize,
    /// Other participants of the same transmission that lack `row` and so
    /// must not hear this stream.
    pub null_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transmission {
    pub s: u32,
    pub participants: Vec<Participant>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransmissionPlan {
    pub users: usize,
    pub rows: usize,
    pub antennas: usize,
    pub transmissions: Vec<Transmission>,
    pub ndt: Rational,
}

impl TransmissionPlan {
    pub fn channel_uses(&self) -> usize {
        self.transmissions.len()
    }

    pub fn transmission(&self, s: u32) -> Option<&Transmission> {
        self.transmissions.iter().find(|t| t.s == s)
    }
}

/// One transmission per integer, participants in column order.
pub fn schedule(d: &DeliveryArray, demand: &DemandVector) -> Result<TransmissionPlan> {
    d.validate()?;
    if demand.len() != d.k() {
        return Err(Error::DimensionMismatch(format!(
            "demand vector has {} entries for {} users",
            demand.len(),
            d.k()
        )));
    }
    let transmissions = d
        .positions()
        .into_iter()
        .map(|(s, mut cells)| {
            cells.sort_by_key(|&(row, col)| (col, row));
            let participants = cells
                .iter()
                .map(|&(row, user)| Participant {
                    user,
                    row,
                    file: demand.of(user),
                    null_set: cells
                        .iter()
                        .filter(|&&(_, other)| other != user && !d.get(row, other).is_star())
                        .map(|&(_, other)| other)
                        .collect(),
                })
                .collect();
            Transmission { s, participants }
        })
        .collect();
    Ok(TransmissionPlan {
        users: d.k(),
        rows: d.f(),
        antennas: d.l(),
        transmissions,
        ndt: Rational::new(i64::from(d.s()), d.f() as i64)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeReport {
    pub passed: bool,
    /// Missing rows served per user, in user order.
    pub served_per_user: Vec<usize>,
    pub max_null_set: usize,
    pub failures: Vec<String>,
}

/// Checks that every participant can cancel or is shielded from every
/// other stream, that null sets fit in `L - 1` antennas, and that each
/// (user, missing row) pair is served exactly once.
pub fn symbolic_decode_check(plan: &TransmissionPlan, d: &DeliveryArray) -> DecodeReport {
    let mut failures = Vec::new();
    let mut served: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut max_null_set = 0;
    for tx in &plan.transmissions {
        let users: BTreeSet<usize> = tx.participants.iter().map(|p| p.user).collect();
        if users.len() != tx.participants.len() {
            failures.push(format!("transmission {}: a user appears twice", tx.s));
        }
        for me in &tx.participants {
            *served.entry((me.user, me.row)).or_default() += 1;
            max_null_set = max_null_set.max(me.null_set.len());
            if me.null_set.len() + 1 > plan.antennas {
                failures.push(format!(
                    "transmission {}: user {} needs {} nulls with {} antennas",
                    tx.s,
                    me.user,
                    me.null_set.len(),
                    plan.antennas
                ));
            }
            for other in tx.participants.iter().filter(|o| o.user != me.user) {
                let cached = d.get(other.row, me.user).is_star();
                let nulled = other.null_set.contains(&me.user);
                if !cached && !nulled {
                    failures.push(format!(
                        "transmission {}: user {} can neither cancel nor avoid the stream for user {} (row {})",
                        tx.s, me.user, other.user, other.row
                    ));
                }
            }
        }
    }
    let k = d.k();
    let mut served_per_user = vec![0; k];
    for row in 1..=d.f() {
        for user in 1..=k {
            let count = served.get(&(user, row)).copied().unwrap_or(0);
            let missing = !d.get(row, user).is_star();
            if missing && count != 1 {
                failures.push(format!("user {user}, row {row}: served {count} times, expected once"));
            }
            if !missing && count > 0 {
                failures.push(format!("user {user}, row {row}: served although cached"));
            }
            served_per_user[user - 1] += count;
        }
    }
    DecodeReport {
        passed: failures.is_empty(),
        served_per_user,
        max_null_set,
        failures,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericReport {
    pub max_relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Channel redraws caused by near-singular solves.
    pub resamples: usize,
}

/// Smallest pivot or gain accepted before a channel is redrawn.
pub const PIVOT_THRESHOLD: f64 = 1e-9;
/// Channel draws allowed per transmission.
pub const MAX_ATTEMPTS: usize = 8;

/// Noiseless zero-forcing simulation. Each transmission draws channels and
/// unit-power payloads from a generator seeded by `(seed, s)`, so results
/// do not depend on thread scheduling. `tolerance` must be positive.
pub fn numeric_simulate(plan: &TransmissionPlan, d: &DeliveryArray, seed: u64, tolerance: f64) -> Result<NumericReport> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive (floating point is never exact), got {tolerance}"
        )));
    }
    let results: Vec<Result<(f64, usize)>> = plan
        .transmissions
        .par_iter()
        .map(|tx| simulate_one(tx, d, plan.antennas, seed))
        .collect();
    let mut max_relative_error: f64 = 0.0;
    let mut resamples = 0;
    for r in results {
        let (err, redraws) = r?;
        max_relative_error = max_relative_error.max(err);
        resamples += redraws;
    }
    Ok(NumericReport {
        max_relative_error,
        tolerance,
        passed: max_relative_error <= tolerance,
        resamples,
    })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * scale
}

fn transpose_product(h: &[Complex64], v: &[Complex64]) -> Complex64 {
    h.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Unit vector `v` with `h^T v = 0` for every `h` in `nulls`: a random
/// vector with the conjugated channels projected out.
fn zero_forcing(nulls: &[&[Complex64]], l: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for h in nulls {
        let mut u: Vec<Complex64> = h.iter().map(Complex64::conj).collect();
        project_out(&mut u, &basis);
        let norm = u.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm < PIVOT_THRESHOLD {
            return None;
        }
        u.iter_mut().for_each(|x| *x /= norm);
        basis.push(u);
    }
    let mut v: Vec<Complex64> = (0..l).map(|_| gaussian(rng)).collect();
    project_out(&mut v, &basis);
    let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if norm < PIVOT_THRESHOLD {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let coeff: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
        v.iter_mut().zip(b).for_each(|(y, x)| *y -= coeff * x);
    }
}

fn simulate_one(tx: &crate::delivery::Transmission, d: &DeliveryArray, l: usize, seed: u64) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ u64::from(tx.s)));
    let k = d.k();
    'attempt: for attempt in 0..MAX_ATTEMPTS {
        let channels: Vec<Vec<Complex64>> = (0..k).map(|_| (0..l).map(|_| gaussian(&mut rng)).collect()).collect();
        let payloads: Vec<Complex64> = tx.participants.iter().map(|_| gaussian(&mut rng)).collect();
        let mut precoders = Vec::with_capacity(tx.participants.len());
        for p in &tx.participants {
            let nulls: Vec<&[Complex64]> = p.null_set.iter().map(|&u| channels[u - 1].as_slice()).collect();
            match zero_forcing(&nulls, l, &mut rng) {
                Some(v) if transpose_product(&channels[p.user - 1], &v).norm() >= PIVOT_THRESHOLD => precoders.push(v),
                _ => continue 'attempt,
            }
        }
        let mut worst: f64 = 0.0;
        for (i, me) in tx.participants.iter().enumerate() {
            let h = &channels[me.user - 1];
            let gains: Vec<Complex64> = precoders.iter().map(|v| transpose_product(h, v)).collect();
            let received: Complex64 = gains.iter().zip(&payloads).map(|(g, x)| g * x).sum();
            let mut residual = received;
            for (u, other) in tx.participants.iter().enumerate() {
                if u != i && d.get(other.row, me.user).is_star() {
                    residual -= gains[u] * payloads[u];
                }
            }
            let estimate = residual / gains[i];
            worst = worst.max((estimate - payloads[i]).norm() / payloads[i].norm());
        }
        return Ok((worst, attempt));
    }
    Err(Error::NumericDegeneracy(format!(
        "transmission {}: no well-conditioned channel after {MAX_ATTEMPTS} draws",
        tx.s
    )))
}
