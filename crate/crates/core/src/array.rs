//! Array types. Storage is row-major and 0-based; every accessor takes
//! 1-based `(row, column)` coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::cyclic::wrap;
use crate::error::{Error, Result};
use crate::verify;

/// A delivery-array or EPDA cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Entry {
    Star,
    Int(u32),
}

impl Entry {
    pub fn is_star(self) -> bool {
        matches!(self, Entry::Star)
    }

    pub fn int(self) -> Option<u32> {
        match self {
            Entry::Star => None,
            Entry::Int(s) => Some(s),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Star => f.write_str("*"),
            Entry::Int(s) => write!(f, "{s}"),
        }
    }
}

/// A `(K, F, Z, r)` caching array: `F x K` stars and nulls, `Z` stars per
/// column (B1), and star supports of columns closer than `r` cyclically are
/// disjoint (B2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CachingArray {
    k: usize,
    f: usize,
    z: usize,
    r: usize,
    stars: Vec<bool>,
    row_labels: Option<Vec<String>>,
}

impl CachingArray {
    /// Builds and validates (B1 with `Z` read off column 1, then B2).
    pub fn new(k: usize, f: usize, r: usize, stars: Vec<bool>) -> Result<Self> {
        if k == 0 || stars.len() != k * f {
            return Err(Error::DimensionMismatch(format!(
                "{} cells for a {f} x {k} caching array",
                stars.len()
            )));
        }
        let z = (0..f).filter(|&j| stars[j * k]).count();
        let array = Self::new_unchecked(k, f, z, r, stars);
        array.validate()?;
        Ok(array)
    }

    /// No B1/B2 check. Used by parsers before validation and by tests that
    /// need deliberately broken arrays.
    pub fn new_unchecked(k: usize, f: usize, z: usize, r: usize, stars: Vec<bool>) -> Self {
        assert_eq!(stars.len(), k * f, "cell count must be F*K");
        CachingArray {
            k,
            f,
            z,
            r,
            stars,
            row_labels: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let violations = verify::check_caching_array(self, self.r);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Violations(violations))
        }
    }

    pub fn with_row_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.f {
            return Err(Error::DimensionMismatch(format!(
                "{} row labels for {} rows",
                labels.len(),
                self.f
            )));
        }
        self.row_labels = Some(labels);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn row_label(&self, row: usize) -> String {
        match &self.row_labels {
            Some(labels) => labels[row - 1].clone(),
            None => row.to_string(),
        }
    }

    pub fn is_star(&self, row: usize, column: usize) -> bool {
        self.stars[(row - 1) * self.k + column - 1]
    }

    /// Rows with a star in `column` (the cache's contents), ascending.
    pub fn column_rows(&self, column: usize) -> Vec<usize> {
        (1..=self.f).filter(|&j| self.is_star(j, column)).collect()
    }

    /// Star mask a delivery array built on this caching array must carry:
    /// `(row, k)` is a star iff some cache `k..=k+r-1` stores `row`.
    pub fn user_mask(&self) -> Vec<bool> {
        self.user_mask_for(self.r)
    }

    pub(crate) fn user_mask_for(&self, r: usize) -> Vec<bool> {
        let mut mask = vec![false; self.k * self.f];
        for j in 0..self.f {
            for col in 1..=self.k {
                mask[j * self.k + col - 1] = (0..r).any(|m| {
                    let cache = wrap((col + m) as i64, self.k);
                    self.stars[j * self.k + cache - 1]
                });
            }
        }
        mask
    }

    /// Copy with one cell replaced; not validated.
    pub fn with_cell(&self, row: usize, column: usize, star: bool) -> Self {
        let mut out = self.clone();
        out.stars[(row - 1) * self.k + column - 1] = star;
        out
    }

    /// `times` copies side by side: column `c + i*K` equals column `c`.
    pub fn hconcat(&self, times: usize) -> Result<Self> {
        let k = self.k * times;
        let mut stars = Vec::with_capacity(k * self.f);
        for j in 0..self.f {
            let row = &self.stars[j * self.k..(j + 1) * self.k];
            for _ in 0..times {
                stars.extend_from_slice(row);
            }
        }
        let mut out = Self::new_unchecked(k, self.f, self.z, self.r, stars);
        out.row_labels = self.row_labels.clone();
        out.validate()?;
        Ok(out)
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn digest(&self) -> String {
        crate::format::digest(self)
    }
}

/// A `(C, S, L)` delivery array: `F x K` stars and integers in `[1, S]`
/// whose stars are dictated by the linked caching array (D1), where every
/// integer occurs and never twice in a column (D2), and every row of the
/// sub-array of integer `s` holds at most `L` integers (D3).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeliveryArray {
    caching: Arc<CachingArray>,
    l: usize,
    s: u32,
    cells: Vec<Entry>,
}

impl DeliveryArray {
    /// Builds and validates D1-D3 against `caching`.
    pub fn new(caching: Arc<CachingArray>, l: usize, s: u32, cells: Vec<Entry>) -> Result<Self> {
        let array = Self::new_unchecked(caching, l, s, cells)?;
        array.validate()?;
        Ok(array)
    }

    /// Dimension check only.
    pub fn new_unchecked(caching: Arc<CachingArray>, l: usize, s: u32, cells: Vec<Entry>) -> Result<Self> {
        if cells.len() != caching.k() * caching.f() {
            return Err(Error::DimensionMismatch(format!(
                "{} cells for a {} x {} delivery array",
                cells.len(),
                caching.f(),
                caching.k()
            )));
        }
        Ok(DeliveryArray { caching, l, s, cells })
    }

    pub fn validate(&self) -> Result<()> {
        let mut violations = verify::check_caching_array(&self.caching, self.caching.r());
        violations.extend(verify::check_delivery_array(&self.caching, self, self.l)?);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Violations(violations))
        }
    }

    pub fn caching(&self) -> &CachingArray {
        &self.caching
    }

    pub fn caching_arc(&self) -> Arc<CachingArray> {
        Arc::clone(&self.caching)
    }

    pub fn k(&self) -> usize {
        self.caching.k()
    }

    pub fn f(&self) -> usize {
        self.caching.f()
    }

    pub fn r(&self) -> usize {
        self.caching.r()
    }

    /// Stars per column of the linked caching array.
    pub fn z(&self) -> usize {
        self.caching.z()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn get(&self, row: usize, column: usize) -> Entry {
        self.cells[(row - 1) * self.k() + column - 1]
    }

    pub fn cells(&self) -> &[Entry] {
        &self.cells
    }

    /// Cells holding each integer, keyed by integer, cells in row-major order.
    pub fn positions(&self) -> BTreeMap<u32, Vec<(usize, usize)>> {
        positions(&self.cells, self.k())
    }

    /// Occurrence count of each integer.
    pub fn occurrences(&self) -> BTreeMap<u32, usize> {
        self.positions().into_iter().map(|(s, p)| (s, p.len())).collect()
    }

    /// Copy with one cell replaced; not validated.
    pub fn with_entry(&self, row: usize, column: usize, entry: Entry) -> Self {
        let mut out = self.clone();
        let k = self.k();
        out.cells[(row - 1) * k + column - 1] = entry;
        out
    }

    /// Same cells under a different antenna budget; not validated.
    pub fn with_antennas(&self, l: usize) -> Self {
        let mut out = self.clone();
        out.l = l;
        out
    }

    /// `times` copies side by side over `caching.hconcat(times)`, antenna
    /// budget multiplied by `times`.
    pub fn hconcat(&self, times: usize) -> Result<Self> {
        let caching = Arc::new(self.caching.hconcat(times)?);
        let k = self.k();
        let mut cells = Vec::with_capacity(self.cells.len() * times);
        for j in 0..self.f() {
            let row = &self.cells[j * k..(j + 1) * k];
            for _ in 0..times {
                cells.extend_from_slice(row);
            }
        }
        DeliveryArray::new(caching, self.l * times, self.s, cells)
    }

    /// The delivery array read as a `(K, L, F, rZ, S)` EPDA.
    pub fn as_epda(&self) -> Epda {
        Epda::new_unchecked(self.k(), self.f(), self.r() * self.z(), self.l, self.s, self.cells.clone())
    }
}

/// A `(K, L, F, Z, S)` extended placement delivery array, `F x K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Epda {
    k: usize,
    f: usize,
    z: usize,
    l: usize,
    s: u32,
    cells: Vec<Entry>,
    regularity: Option<usize>,
}

impl Epda {
    /// Builds and validates C1-C4; regularity is detected.
    pub fn new(k: usize, f: usize, z: usize, l: usize, s: u32, cells: Vec<Entry>) -> Result<Self> {
        if cells.len() != k * f {
            return Err(Error::DimensionMismatch(format!("{} cells for a {f} x {k} EPDA", cells.len())));
        }
        let mut array = Self::new_unchecked(k, f, z, l, s, cells);
        array.validate()?;
        array.regularity = verify::regularity(&array);
        Ok(array)
    }

    pub fn new_unchecked(k: usize, f: usize, z: usize, l: usize, s: u32, cells: Vec<Entry>) -> Self {
        assert_eq!(cells.len(), k * f, "cell count must be F*K");
        Epda {
            k,
            f,
            z,
            l,
            s,
            cells,
            regularity: None,
        }
    }

    /// Declares a regularity to be checked by [`verify::check_epda`].
    pub fn with_declared_regularity(mut self, g: Option<usize>) -> Self {
        self.regularity = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let violations = verify::check_epda(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Violations(violations))
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn regularity(&self) -> Option<usize> {
        self.regularity
    }

    pub fn get(&self, row: usize, column: usize) -> Entry {
        self.cells[(row - 1) * self.k + column - 1]
    }

    pub fn cells(&self) -> &[Entry] {
        &self.cells
    }

    pub fn positions(&self) -> BTreeMap<u32, Vec<(usize, usize)>> {
        positions(&self.cells, self.k)
    }

    pub fn with_entry(&self, row: usize, column: usize, entry: Entry) -> Self {
        let mut out = self.clone();
        out.cells[(row - 1) * self.k + column - 1] = entry;
        out
    }

    /// `(K, L, F, Z, S)`.
    pub fn parameters(&self) -> (usize, usize, usize, usize, u32) {
        (self.k, self.l, self.f, self.z, self.s)
    }
}

pub(crate) fn positions(cells: &[Entry], k: usize) -> BTreeMap<u32, Vec<(usize, usize)>> {
    let mut map: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (idx, cell) in cells.iter().enumerate() {
        if let Entry::Int(s) = cell {
            map.entry(*s).or_default().push((idx / k + 1, idx % k + 1));
        }
    }
    map
}
