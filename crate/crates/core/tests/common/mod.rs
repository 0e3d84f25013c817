//! Fixture loading shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use macc_core::{CachingArray, DeliveryArray, Entry};

pub fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

/// A bare grid: one row per line, `cells [; label]`, `#` comments.
pub struct Grid {
    pub rows: Vec<Vec<String>>,
    pub labels: Vec<Option<String>>,
}

pub fn grid(name: &str) -> Grid {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for line in fixture(name).lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (cells, label) = match line.split_once(';') {
            Some((c, l)) => (c, Some(l.trim().to_string())),
            None => (line, None),
        };
        rows.push(cells.split_whitespace().map(str::to_string).collect());
        labels.push(label);
    }
    Grid { rows, labels }
}

pub fn caching_tokens(c: &CachingArray) -> Vec<Vec<String>> {
    (1..=c.f())
        .map(|j| (1..=c.k()).map(|k| if c.is_star(j, k) { "*" } else { "." }.to_string()).collect())
        .collect()
}

pub fn delivery_tokens(d: &DeliveryArray) -> Vec<Vec<String>> {
    (1..=d.f()).map(|j| (1..=d.k()).map(|k| d.get(j, k).to_string()).collect()).collect()
}

pub fn grid_entries(g: &Grid) -> Vec<Entry> {
    g.rows
        .iter()
        .flatten()
        .map(|t| if t == "*" { Entry::Star } else { Entry::Int(t.parse().expect("integer cell")) })
        .collect()
}

/// `(1 3 5 7, 7 1)` -> `(1357,71)`.
pub fn compact_label(label: &str) -> String {
    label.replace(", ", ",").replace(' ', "")
}
