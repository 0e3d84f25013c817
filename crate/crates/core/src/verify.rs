//! Exhaustive condition checkers, scheme metrics and a tiny-instance
//! brute-force filler.
//!
//! Checkers return violations as data, sorted by condition then location;
//! an empty list means the array is valid.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::array::{positions, CachingArray, DeliveryArray, Entry, Epda};
use crate::error::{Error, Result};
use crate::params::NetworkParams;
use crate::rational::Rational;
use crate::violation::{Condition, Location, Violation};

/// B1 (every column has `Z` stars) and B2 (columns within cyclic distance
/// `r` have disjoint star rows) for access degree `r`.
pub fn check_caching_array(c: &CachingArray, r: usize) -> Vec<Violation> {
    let (k, f) = (c.k(), c.f());
    let mut out = Vec::new();
    for col in 1..=k {
        let count = (1..=f).filter(|&j| c.is_star(j, col)).count();
        if count != c.z() {
            out.push(Violation::new(
                Condition::B1,
                Location::Column { column: col },
                format!("{count} stars, expected Z = {}", c.z()),
            ));
        }
    }
    for first in 1..=k {
        for second in first + 1..=k {
            let forward = second - first;
            let backward = k - forward;
            if forward >= r && backward >= r {
                continue;
            }
            let shared: Vec<usize> = (1..=f).filter(|&j| c.is_star(j, first) && c.is_star(j, second)).collect();
            if let Some(&row) = shared.first() {
                out.push(Violation::new(
                    Condition::B2,
                    Location::ColumnPair { first, second },
                    format!("both store row {row} ({} shared rows) but are within distance {r}", shared.len()),
                ));
            }
        }
    }
    out.sort();
    out
}

/// D1 (stars follow the caching array), D2 (every integer of `[1, S]`
/// occurs, none twice per column) and D3 (rows of each integer's sub-array
/// hold at most `l` integers).
pub fn check_delivery_array(c: &CachingArray, d: &DeliveryArray, l: usize) -> Result<Vec<Violation>> {
    if (c.k(), c.f()) != (d.k(), d.f()) {
        return Err(Error::DimensionMismatch(format!(
            "caching array is {} x {}, delivery array is {} x {}",
            c.f(),
            c.k(),
            d.f(),
            d.k()
        )));
    }
    let k = c.k();
    let mask = c.user_mask();
    let mut out = Vec::new();
    for (idx, cell) in d.cells().iter().enumerate() {
        let (row, column) = (idx / k + 1, idx % k + 1);
        match (mask[idx], cell) {
            (true, Entry::Int(s)) => out.push(Violation::new(
                Condition::D1,
                Location::Cell { row, column },
                format!("integer {s} where the user's caches store the row"),
            )),
            (false, Entry::Star) => out.push(Violation::new(
                Condition::D1,
                Location::Cell { row, column },
                "star where no accessible cache stores the row",
            )),
            _ => {}
        }
    }
    out.extend(integer_conditions(d.cells(), k, d.s(), l, Condition::D2, Condition::D2, Condition::D3));
    out.sort();
    Ok(out)
}

/// C1-C4 plus the declared regularity, if any.
pub fn check_epda(a: &Epda) -> Vec<Violation> {
    let (k, f) = (a.k(), a.f());
    let mut out = Vec::new();
    for col in 1..=k {
        let count = (1..=f).filter(|&j| a.get(j, col).is_star()).count();
        if count != a.z() {
            out.push(Violation::new(
                Condition::C1,
                Location::Column { column: col },
                format!("{count} stars, expected Z = {}", a.z()),
            ));
        }
    }
    out.extend(integer_conditions(a.cells(), k, a.s(), a.l(), Condition::C2, Condition::C3, Condition::C4));
    if let Some(g) = a.regularity() {
        for (s, cells) in a.positions() {
            if cells.len() != g {
                out.push(Violation::new(
                    Condition::Regularity,
                    Location::Integer { s },
                    format!("occurs {} times, declared regularity {g}", cells.len()),
                ));
            }
        }
    }
    out.sort();
    out
}

/// `Some(g)` iff every integer occurs exactly `g` times.
pub fn regularity(a: &Epda) -> Option<usize> {
    let counts: BTreeSet<usize> = a.positions().values().map(Vec::len).collect();
    match counts.len() {
        1 => counts.into_iter().next(),
        _ => None,
    }
}

/// Shared integer rules of delivery arrays and EPDAs: `presence` for
/// integers never used, `column` for repeats within a column, `rows` for
/// sub-array rows holding more than `l` integers.
fn integer_conditions(
    cells: &[Entry],
    k: usize,
    s_max: u32,
    l: usize,
    presence: Condition,
    column: Condition,
    rows: Condition,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let pos = positions(cells, k);
    for s in 1..=s_max {
        if !pos.contains_key(&s) {
            out.push(Violation::new(presence, Location::Integer { s }, format!("never occurs (S = {s_max})")));
        }
    }
    for (&s, cells_of_s) in &pos {
        if s == 0 || s > s_max {
            for &(row, col) in cells_of_s {
                out.push(Violation::new(
                    presence,
                    Location::Cell { row, column: col },
                    format!("integer {s} outside [1, {s_max}]"),
                ));
            }
        }
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for &(row, col) in cells_of_s {
            if let Some(prev) = seen.insert(col, row) {
                out.push(Violation::new(
                    column,
                    Location::Cell { row, column: col },
                    format!("integer {s} repeats in column {col} (also row {prev})"),
                ));
            }
        }
        let sub_rows: BTreeSet<usize> = cells_of_s.iter().map(|p| p.0).collect();
        let sub_cols: BTreeSet<usize> = cells_of_s.iter().map(|p| p.1).collect();
        for &row in &sub_rows {
            let count = sub_cols
                .iter()
                .filter(|&&col| !cells[(row - 1) * k + col - 1].is_star())
                .count();
            if count > l {
                out.push(Violation::new(
                    rows,
                    Location::IntegerRow { s, row },
                    format!("{count} integers in this row of the sub-array of {s}, limit {l}"),
                ));
            }
        }
    }
    out
}

/// Exact performance figures of a verified scheme.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchemeMetrics {
    pub k: usize,
    pub r: usize,
    pub t: usize,
    pub l: usize,
    pub f: usize,
    pub z: usize,
    pub s: u32,
    /// Normalized delivery time `S / F`.
    pub ndt: Rational,
    /// `(K - rt) / NDT`; absent when nothing is transmitted.
    pub dof: Option<Rational>,
    /// `(K - rt) / (rt + L)`, the best NDT under uncoded placement and
    /// one-shot delivery.
    pub optimal_bound: Rational,
    pub memory_ratio: Rational,
    pub occurrences: BTreeMap<u32, usize>,
    pub optimal: bool,
}

/// Metrics of `(c, d)` operated under `params` (its `L` is the antenna
/// count the D3 check is held to). Fails unless both arrays verify.
pub fn metrics(c: &CachingArray, d: &DeliveryArray, params: &NetworkParams) -> Result<SchemeMetrics> {
    if (c.k(), c.r()) != (params.k, params.r) {
        return Err(Error::DimensionMismatch(format!(
            "arrays are built for K={}, r={} but parameters say K={}, r={}",
            c.k(),
            c.r(),
            params.k,
            params.r
        )));
    }
    let mut violations = check_caching_array(c, params.r);
    violations.extend(check_delivery_array(c, d, params.l)?);
    if !violations.is_empty() {
        return Err(Error::Violations(violations));
    }
    let (k, rt) = (params.k as i64, params.rt() as i64);
    let ndt = Rational::new(i64::from(d.s()), c.f() as i64)?;
    let dof = (d.s() > 0).then(|| Rational::from_integer(k - rt) / ndt);
    let optimal_bound = Rational::new(k - rt, rt + params.l as i64)?;
    Ok(SchemeMetrics {
        k: params.k,
        r: params.r,
        t: params.t,
        l: params.l,
        f: c.f(),
        z: c.z(),
        s: d.s(),
        ndt,
        dof,
        optimal_bound,
        memory_ratio: Rational::new(c.z() as i64, c.f() as i64)?,
        occurrences: d.occurrences(),
        optimal: ndt == optimal_bound,
    })
}

/// Largest caching array the brute-force filler accepts.
pub const BRUTE_FORCE_MAX_ROWS: usize = 12;
pub const BRUTE_FORCE_MAX_COLUMNS: usize = 8;

/// Searches for a delivery array on `c` with the fewest integers, using
/// `params.l` antennas. Cells are filled row-major with integers tried in
/// ascending order, and `S` grows from the column lower bound, so the
/// answer is deterministic. Returns `None` when `budget` search nodes run
/// out.
pub fn brute_force_min_fill(c: &CachingArray, params: &NetworkParams, budget: u64) -> Result<Option<DeliveryArray>> {
    let (k, f) = (c.k(), c.f());
    if f > BRUTE_FORCE_MAX_ROWS || k > BRUTE_FORCE_MAX_COLUMNS {
        return Err(Error::CapExceeded(format!(
            "brute force handles at most {BRUTE_FORCE_MAX_ROWS} rows and {BRUTE_FORCE_MAX_COLUMNS} columns, got {f} x {k}"
        )));
    }
    let mask = c.user_mask_for(params.r);
    let open: Vec<(usize, usize)> = (0..f * k).filter(|&i| !mask[i]).map(|i| (i / k, i % k)).collect();
    let row_open: Vec<u16> = (0..f)
        .map(|j| (0..k).filter(|&col| !mask[j * k + col]).fold(0u16, |m, col| m | 1 << col))
        .collect();
    let lower = (0..k).map(|col| (0..f).filter(|&j| !mask[j * k + col]).count()).max().unwrap_or(0);

    let mut search = Search {
        open: &open,
        row_open: &row_open,
        l: params.l as u32,
        nodes: 0,
        budget,
        assignment: vec![0; open.len()],
        rows: Vec::new(),
        cols: Vec::new(),
    };
    for s in lower..=open.len() {
        search.rows = vec![0; s + 1];
        search.cols = vec![0; s + 1];
        match search.fill(0, 0, s as u32) {
            Some(true) => {
                let mut cells: Vec<Entry> = mask.iter().map(|_| Entry::Star).collect();
                for (&(j, col), &v) in open.iter().zip(&search.assignment) {
                    cells[j * k + col] = Entry::Int(v);
                }
                let caching = Arc::new(c.clone());
                return DeliveryArray::new(caching, params.l, s as u32, cells).map(Some);
            }
            Some(false) => continue,
            None => return Ok(None),
        }
    }
    Ok(None)
}

struct Search<'a> {
    open: &'a [(usize, usize)],
    row_open: &'a [u16],
    l: u32,
    nodes: u64,
    budget: u64,
    assignment: Vec<u32>,
    /// Per integer: bitmask of rows and of columns holding it.
    rows: Vec<u16>,
    cols: Vec<u16>,
}

impl Search<'_> {
    /// `Some(found)`, or `None` when the node budget is exhausted.
    fn fill(&mut self, idx: usize, used: u32, s_max: u32) -> Option<bool> {
        if idx == self.open.len() {
            return Some(used == s_max);
        }
        if ((self.open.len() - idx) as u32) < s_max - used {
            return Some(false);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let (row, col) = self.open[idx];
        let (rbit, cbit) = (1u16 << row, 1u16 << col);
        for v in 1..=(used + 1).min(s_max) {
            let s = v as usize;
            if self.cols[s] & cbit != 0 {
                continue;
            }
            let rows = self.rows[s] | rbit;
            let cols = self.cols[s] | cbit;
            let within = (0..self.row_open.len())
                .filter(|j| rows >> j & 1 == 1)
                .all(|j| (self.row_open[j] & cols).count_ones() <= self.l);
            if !within {
                continue;
            }
            let saved = (self.rows[s], self.cols[s]);
            self.rows[s] = rows;
            self.cols[s] = cols;
            self.assignment[idx] = v;
            let result = self.fill(idx + 1, used.max(v), s_max);
            self.rows[s] = saved.0;
            self.cols[s] = saved.1;
            match result {
                Some(false) => {}
                other => return other,
            }
        }
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::wrap;

    fn cyclic_caching(k: usize, t: usize, r: usize) -> CachingArray {
        let mut stars = vec![false; k * k];
        for col in 1..=k {
            for o in 0..t {
                let row = wrap(((col - 1) * t + 1 + o) as i64, k);
                stars[(row - 1) * k + col - 1] = true;
            }
        }
        CachingArray::new_unchecked(k, k, t, r, stars)
    }

    #[test]
    fn b2_flags_overlapping_neighbours() {
        let c = cyclic_caching(7, 2, 4);
        let v = check_caching_array(&c, 4);
        assert!(v.iter().any(|v| v.condition == Condition::B2
            && v.location == Location::ColumnPair { first: 1, second: 4 }));
        assert!(check_caching_array(&c, 2).is_empty());
    }

    #[test]
    fn all_null_is_valid() {
        let c = CachingArray::new_unchecked(4, 3, 0, 2, vec![false; 12]);
        assert!(check_caching_array(&c, 2).is_empty());
    }

    #[test]
    fn epda_conditions() {
        // 2 x 2, one star per column, integer 1 on the anti-diagonal.
        let cells = vec![Entry::Star, Entry::Int(1), Entry::Int(1), Entry::Star];
        let a = Epda::new(2, 2, 1, 1, 1, cells.clone()).unwrap();
        assert_eq!(regularity(&a), Some(2));
        let missing = Epda::new_unchecked(2, 2, 1, 1, 2, cells);
        assert_eq!(check_epda(&missing)[0].condition, Condition::C2);
        let repeat = Epda::new_unchecked(2, 2, 0, 2, 1, vec![Entry::Int(1); 4]);
        assert!(check_epda(&repeat).iter().any(|v| v.condition == Condition::C3));
    }

    #[test]
    fn brute_force_minimum_is_column_bound_when_attainable() {
        let c = cyclic_caching(7, 2, 2);
        let p = NetworkParams::new(7, 2, 2, 3).unwrap();
        let d = brute_force_min_fill(&c, &p, 10_000_000).unwrap().unwrap();
        assert_eq!(d.s(), 3);
    }

    #[test]
    fn brute_force_without_open_cells() {
        let c = cyclic_caching(2, 1, 1);
        let p = NetworkParams::new(2, 1, 1, 1).unwrap();
        let full = CachingArray::new_unchecked(2, 2, 2, 1, vec![true; 4]);
        assert_eq!(brute_force_min_fill(&full, &p, 10).unwrap().unwrap().s(), 0);
        assert!(brute_force_min_fill(&c, &p, 0).unwrap().is_none());
    }

    #[test]
    fn brute_force_caps() {
        let c = cyclic_caching(9, 1, 1);
        let p = NetworkParams::new(9, 1, 1, 1).unwrap();
        assert!(matches!(brute_force_min_fill(&c, &p, 10), Err(Error::CapExceeded(_))));
    }
}
