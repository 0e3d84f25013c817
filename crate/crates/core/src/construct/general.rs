//! Construction for any `K >= r(t+L)`.
//!
//! Rows are indexed by pairs `(J, w)`: `J` is a `(t+L)`-subset of caches
//! whose members sit at least `r` apart cyclically, and `w` is a window of
//! `t` cyclically consecutive members of `J`. Row `(J, w)` is stored by
//! exactly the caches in `w`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::array::{CachingArray, DeliveryArray, Entry};
use crate::cyclic::{binomial_signed, wrap};
use crate::error::{Error, Result};
use crate::params::NetworkParams;

/// A row of the construction: an admissible set and the first position of
/// its window.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowIndex {
    /// Ascending cache indices.
    pub set: Vec<usize>,
    /// 1-based position in `set` where the window begins.
    pub window_start: usize,
}

impl RowIndex {
    /// The `t` window members in cyclic order from `window_start`.
    pub fn window(&self, t: usize) -> Vec<usize> {
        let n = self.set.len();
        (0..t).map(|o| self.set[wrap((self.window_start + o) as i64, n) - 1]).collect()
    }

    /// Label such as `(1 3 5 7, 7 1)`.
    pub fn label(&self, t: usize) -> String {
        format!("({}, {})", join(&self.set), join(&self.window(t)))
    }
}

fn join(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

/// Intermediate sets of the third filling case, where neither the column's
/// user nor any of its other caches belongs to the row's set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseIiiDerivation {
    /// The row's set with the column's user inserted, ascending.
    pub merged: Vec<usize>,
    /// 1-based position of the column's user in `merged`.
    pub column_position: usize,
    /// 1-based position of `target` in `merged`.
    pub target_position: usize,
    /// `merged` after the entries strictly between the two positions
    /// (cyclically, target side first) move down by `r-1`.
    pub shifted: Vec<usize>,
    /// `shifted` without `target`, ascending. This names the block whose
    /// integer the cell receives.
    pub successor: Vec<usize>,
    /// The set member just before the window.
    pub target: usize,
}

fn check_domain(params: &NetworkParams) -> Result<()> {
    params.require_caching()?;
    let need = params.r * (params.t + params.l);
    if params.k < need {
        return Err(Error::Domain(format!(
            "needs K >= r(t+L) = {need}, got K = {}",
            params.k
        )));
    }
    Ok(())
}

/// Closed-form row count `K * C(K-(r-1)(t+L)-1, t+L-1)`.
pub fn subpacketization(params: &NetworkParams) -> u64 {
    let n = (params.t + params.l) as i64;
    let (k, r) = (params.k as i64, params.r as i64);
    k as u64 * binomial_signed(k - (r - 1) * n - 1, n - 1)
}

/// Closed-form integer count `K(K-rt)/(t+L) * C(K-(r-1)(t+L)-1, t+L-1)`.
pub fn integer_count(params: &NetworkParams) -> u64 {
    let n = (params.t + params.l) as u64;
    subpacketization(params) / n * (params.k - params.rt()) as u64
}

fn admissible(set: &[usize], k: usize, r: usize) -> bool {
    set.windows(2).all(|p| p[1] >= p[0] + r)
        && match (set.first(), set.last()) {
            (Some(&a), Some(&b)) => a + k - b >= r,
            _ => true,
        }
}

/// All `(t+L)`-subsets of `[K]` with pairwise cyclic gaps of at least `r`,
/// in lexicographic order.
pub fn admissible_sets(params: &NetworkParams) -> Result<Vec<Vec<usize>>> {
    check_domain(params)?;
    Ok(enumerate_sets(params.k, params.r, params.t + params.l))
}

fn enumerate_sets(k: usize, r: usize, n: usize) -> Vec<Vec<usize>> {
    fn grow(k: usize, r: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            if admissible(cur, k, r) {
                out.push(cur.clone());
            }
            return;
        }
        let from = cur.last().map_or(1, |&j| j + r);
        let remaining = n - cur.len() - 1;
        for j in from..=k {
            if j + remaining * r > k {
                break;
            }
            cur.push(j);
            grow(k, r, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(k, r, n, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Every row index, sets in lexicographic order and windows by start.
pub fn enumerate_index_set(params: &NetworkParams) -> Result<Vec<RowIndex>> {
    let n = params.t + params.l;
    Ok(admissible_sets(params)?
        .into_iter()
        .flat_map(|set| (1..=n).map(move |window_start| RowIndex { set: set.clone(), window_start }))
        .collect())
}

struct Universe {
    sets: Vec<Vec<usize>>,
    rank: HashMap<Vec<usize>, usize>,
}

impl Universe {
    fn new(params: &NetworkParams) -> Result<Self> {
        let sets = admissible_sets(params)?;
        let rank = sets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Universe { sets, rank })
    }

    fn rank(&self, set: &[usize]) -> Result<usize> {
        self.rank
            .get(set)
            .copied()
            .ok_or_else(|| Error::Domain(format!("{set:?} is not an admissible set")))
    }
}

/// 0-based lexicographic rank of `set` among the admissible sets.
pub fn phi(set: &[usize], params: &NetworkParams) -> Result<usize> {
    Universe::new(params)?.rank(set)
}

/// Caches touched by users in `set`: `j, j+1, ..., j+r-1` for each member.
fn covered(set: &[usize], k: usize, r: usize) -> Vec<bool> {
    let mut hit = vec![false; k + 1];
    for &j in set {
        for m in 0..r {
            hit[wrap((j + m) as i64, k)] = true;
        }
    }
    hit
}

/// 1-based position of cache `i` among the caches not covered by `set`.
pub fn psi(set: &[usize], i: usize, params: &NetworkParams) -> Result<usize> {
    let hit = covered(set, params.k, params.r);
    if i == 0 || i > params.k || hit[i] {
        return Err(Error::Domain(format!("cache {i} is covered by {set:?}")));
    }
    Ok((1..=i).filter(|&c| !hit[c]).count())
}

/// Sets up the third filling case for row `(set, window_start)` and
/// column `k`.
pub fn derive_case_iii(
    set: &[usize],
    window_start: usize,
    k: usize,
    params: &NetworkParams,
) -> Result<CaseIiiDerivation> {
    let (kk, r) = (params.k, params.r);
    let n = set.len();
    if (0..r).any(|m| set.contains(&wrap((k + m) as i64, kk))) {
        return Err(Error::Domain(format!("caches {k}..{k}+{} meet {set:?}", r - 1)));
    }
    let target = set[wrap(window_start as i64 - 1, n) - 1];
    let mut merged = set.to_vec();
    merged.push(k);
    merged.sort_unstable();
    let position = |v: usize| merged.iter().position(|&x| x == v).map(|p| p + 1).unwrap_or(0);
    let column_position = position(k);
    let target_position = position(target);
    let size = n + 1;
    let mut shifted = merged.clone();
    let mut q = wrap(target_position as i64 + 1, size);
    while q != column_position {
        shifted[q - 1] = wrap(merged[q - 1] as i64 - (r as i64 - 1), kk);
        q = wrap(q as i64 + 1, size);
    }
    let mut successor: Vec<usize> =
        shifted.iter().enumerate().filter(|&(i, _)| i + 1 != target_position).map(|(_, &v)| v).collect();
    successor.sort_unstable();
    if !admissible(&successor, kk, r) {
        return Err(Error::Domain(format!(
            "derived set {successor:?} for row ({set:?}, {window_start}), column {k} is not admissible"
        )));
    }
    Ok(CaseIiiDerivation {
        merged,
        column_position,
        target_position,
        shifted,
        successor,
        target,
    })
}

/// Caching array: star at row `(J, w)`, column `k` iff `k` is in `w`.
pub fn build_caching_array_i(params: &NetworkParams) -> Result<CachingArray> {
    let rows = enumerate_index_set(params)?;
    let k = params.k;
    let mut stars = vec![false; rows.len() * k];
    for (idx, row) in rows.iter().enumerate() {
        for col in row.window(params.t) {
            stars[idx * k + col - 1] = true;
        }
    }
    let labels = rows.iter().map(|row| row.label(params.t)).collect();
    CachingArray::new(k, rows.len(), params.r, stars)?.with_row_labels(labels)
}

/// Fills the delivery array on a caching array from
/// [`build_caching_array_i`] with the same parameters.
pub fn build_delivery_array_i(c: &CachingArray, params: &NetworkParams) -> Result<DeliveryArray> {
    let universe = Universe::new(params)?;
    let n = params.t + params.l;
    let (k, r, l) = (params.k, params.r, params.l);
    if (c.k(), c.f(), c.r()) != (k, universe.sets.len() * n, r) {
        return Err(Error::DimensionMismatch(format!(
            "caching array is {} x {} with r={}, parameters need {} x {k} with r={r}",
            c.f(),
            c.k(),
            c.r(),
            universe.sets.len() * n
        )));
    }
    let block = params.k - params.rt();
    let mask = c.user_mask();
    let mut cells = Vec::with_capacity(c.f() * k);
    for (rank, set) in universe.sets.iter().enumerate() {
        let in_set: HashMap<usize, usize> = set.iter().enumerate().map(|(p, &v)| (v, p + 1)).collect();
        for i in 1..=n {
            let row = rank * n + i - 1;
            for col in 1..=k {
                if mask[row * k + col - 1] {
                    cells.push(Entry::Star);
                    continue;
                }
                let offset = |pos: usize| wrap(i as i64 - pos as i64, n);
                let value = if let Some(&pos) = in_set.get(&col) {
                    block * rank + offset(pos)
                } else {
                    let hits: Vec<(usize, usize)> = (1..r)
                        .filter_map(|m| in_set.get(&wrap((col + m) as i64, k)).map(|&pos| (m, pos)))
                        .collect();
                    match hits.as_slice() {
                        [(m, pos)] => block * rank + m * l + offset(*pos),
                        [] => {
                            let d = derive_case_iii(set, i, col, params)?;
                            let to = universe.rank(&d.successor)?;
                            block * to + r * l + psi(&d.successor, d.target, params)?
                        }
                        _ => {
                            return Err(Error::Domain(format!(
                                "column {col} sees several members of {set:?}"
                            )))
                        }
                    }
                };
                cells.push(Entry::Int(value as u32));
            }
        }
    }
    let s = (block * universe.sets.len()) as u32;
    DeliveryArray::new(Arc::new(c.clone()), l, s, cells)
}

/// Builds at `(K/g, r, t/g, L/g)` with `g = gcd(K, t, L)` and places `g`
/// copies side by side. Rows shrink while the delivery time is unchanged.
pub fn gcd_reduced_arrays(params: &NetworkParams) -> Result<(CachingArray, DeliveryArray)> {
    let g = params.gamma();
    if g == 1 {
        return Err(Error::NoReduction);
    }
    check_domain(params)?;
    let reduced = NetworkParams::with_files(params.k / g, params.r, params.t / g, params.l / g, params.n)?;
    let c = build_caching_array_i(&reduced)?;
    let d = build_delivery_array_i(&c, &reduced)?.hconcat(g)?;
    Ok((d.caching().clone(), d))
}
