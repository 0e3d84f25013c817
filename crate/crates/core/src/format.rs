//! Line-based text interchange format.
//!
//! ```text
//! macc-array 1
//! kind delivery
//! caching-sha256 5b1e...
//! K 7
//! F 7
//! L 3
//! S 3
//! * 2 * * 3 1 * ; 1
//! ...
//! macc-array 1
//! kind caching
//! K 7
//! F 7
//! Z 2
//! r 2
//! * . . * . . . ; 1
//! ...
//! ```
//!
//! Every section starts with `macc-array 1`. A row line holds whitespace
//! separated cell tokens (`*` star, `.` null, or a positive integer),
//! optionally followed by `; label`. Lines starting with `#` are comments.
//! A delivery document is a delivery section followed by the caching section
//! it was built on; the digest line pins that caching section.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::array::{CachingArray, DeliveryArray, Entry, Epda};
use crate::error::{Error, Result};
use crate::verify;

const MAGIC: &str = "macc-array 1";

/// Any array the format can carry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Caching(CachingArray),
    Delivery(DeliveryArray),
    Epda(Epda),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Caching(_) => "caching",
            Document::Delivery(_) => "delivery",
            Document::Epda(_) => "epda",
        }
    }
}

impl From<CachingArray> for Document {
    fn from(c: CachingArray) -> Self {
        Document::Caching(c)
    }
}

impl From<DeliveryArray> for Document {
    fn from(d: DeliveryArray) -> Self {
        Document::Delivery(d)
    }
}

impl From<Epda> for Document {
    fn from(a: Epda) -> Self {
        Document::Epda(a)
    }
}

pub fn serialize(doc: &Document) -> String {
    match doc {
        Document::Caching(c) => serialize_caching(c),
        Document::Delivery(d) => serialize_delivery(d),
        Document::Epda(a) => serialize_epda(a),
    }
}

pub fn serialize_caching(c: &CachingArray) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}\nkind caching\nK {}\nF {}\nZ {}\nr {}", c.k(), c.f(), c.z(), c.r());
    for row in 1..=c.f() {
        let tokens: Vec<&str> = (1..=c.k()).map(|col| if c.is_star(row, col) { "*" } else { "." }).collect();
        push_row(&mut out, &tokens, c.row_labels().map(|l| l[row - 1].as_str()));
    }
    out
}

pub fn serialize_delivery(d: &DeliveryArray) -> String {
    let caching = serialize_caching(d.caching());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{MAGIC}\nkind delivery\ncaching-sha256 {}\nK {}\nF {}\nL {}\nS {}",
        sha256_hex(&caching),
        d.k(),
        d.f(),
        d.l(),
        d.s()
    );
    push_entries(&mut out, d.cells(), d.k(), d.caching().row_labels());
    out.push_str(&caching);
    out
}

pub fn serialize_epda(a: &Epda) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}\nkind epda\nK {}\nF {}\nZ {}\nL {}\nS {}", a.k(), a.f(), a.z(), a.l(), a.s());
    if let Some(g) = a.regularity() {
        let _ = writeln!(out, "g {g}");
    }
    push_entries(&mut out, a.cells(), a.k(), None);
    out
}

/// SHA-256 of the canonical caching serialization, lowercase hex.
pub fn digest(c: &CachingArray) -> String {
    sha256_hex(&serialize_caching(c))
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn push_entries(out: &mut String, cells: &[Entry], k: usize, labels: Option<&[String]>) {
    for (idx, row) in cells.chunks(k).enumerate() {
        let tokens: Vec<String> = row.iter().map(Entry::to_string).collect();
        let tokens: Vec<&str> = tokens.iter().map(String::as_str).collect();
        push_row(out, &tokens, labels.map(|l| l[idx].as_str()));
    }
}

fn push_row(out: &mut String, tokens: &[&str], label: Option<&str>) {
    out.push_str(&tokens.join(" "));
    if let Some(label) = label {
        out.push_str(" ; ");
        out.push_str(label);
    }
    out.push('\n');
}

/// Parses and fully validates a document. Violations come back as
/// [`Error::Violations`] naming the condition and the cell.
pub fn deserialize(text: &str) -> Result<Document> {
    let doc = parse_lenient(text)?;
    match &doc {
        Document::Caching(c) => c.validate()?,
        Document::Delivery(d) => d.validate()?,
        Document::Epda(a) => {
            let violations = verify::check_epda(a);
            if !violations.is_empty() {
                return Err(Error::Violations(violations));
            }
        }
    }
    Ok(match doc {
        Document::Epda(a) if a.regularity().is_none() => {
            let g = verify::regularity(&a);
            Document::Epda(a.with_declared_regularity(g))
        }
        other => other,
    })
}

/// Parses structure and dimensions only; condition checks are left to the
/// caller (this is what `verify` wants, so it can list every violation).
pub fn parse_lenient(text: &str) -> Result<Document> {
    let sections = split_sections(text)?;
    let first = &sections[0];
    match first.kind.as_str() {
        "caching" => {
            if sections.len() > 1 {
                return Err(Error::parse(sections[1].start, "unexpected section after a caching array"));
            }
            Ok(Document::Caching(caching_from(first)?))
        }
        "epda" => {
            if sections.len() > 1 {
                return Err(Error::parse(sections[1].start, "unexpected section after an EPDA"));
            }
            Ok(Document::Epda(epda_from(first)?))
        }
        "delivery" => {
            let Some(linked) = sections.get(1) else {
                return Err(Error::parse(first.start, "delivery document lacks its caching section"));
            };
            if linked.kind != "caching" {
                return Err(Error::parse(linked.start, "delivery section must be followed by a caching section"));
            }
            if sections.len() > 2 {
                return Err(Error::parse(sections[2].start, "unexpected third section"));
            }
            let caching = caching_from(linked)?;
            let declared = first.header("caching-sha256")?;
            let actual = digest(&caching);
            if declared.1 != actual {
                return Err(Error::parse(
                    declared.0,
                    format!("caching-sha256 mismatch: document says {}, caching section hashes to {actual}", declared.1),
                ));
            }
            Ok(Document::Delivery(delivery_from(first, caching)?))
        }
        other => Err(Error::parse(first.start + 1, format!("unknown kind {other:?}"))),
    }
}

struct Section {
    start: usize,
    kind: String,
    headers: BTreeMap<String, (usize, String)>,
    rows: Vec<(usize, Vec<String>, Option<String>)>,
}

impl Section {
    fn header(&self, key: &str) -> Result<(usize, &str)> {
        self.headers
            .get(key)
            .map(|(line, v)| (*line, v.as_str()))
            .ok_or_else(|| Error::parse(self.start, format!("missing header {key:?}")))
    }

    fn number(&self, key: &str) -> Result<usize> {
        let (line, value) = self.header(key)?;
        value
            .parse()
            .map_err(|_| Error::parse(line, format!("header {key:?} is not a non-negative integer: {value:?}")))
    }

    fn dims(&self) -> Result<(usize, usize)> {
        let k = self.number("K")?;
        let f = self.number("F")?;
        if k == 0 {
            return Err(Error::parse(self.start, "K must be positive"));
        }
        if self.rows.len() != f {
            return Err(Error::parse(self.start, format!("F is {f} but {} rows follow", self.rows.len())));
        }
        for (line, cells, _) in &self.rows {
            if cells.len() != k {
                return Err(Error::parse(*line, format!("row has {} cells, expected K = {k}", cells.len())));
            }
        }
        Ok((k, f))
    }

    fn labels(&self) -> Result<Option<Vec<String>>> {
        let present = self.rows.iter().filter(|r| r.2.is_some()).count();
        if present == 0 {
            return Ok(None);
        }
        if present != self.rows.len() {
            let line = self.rows.iter().find(|r| r.2.is_none()).map_or(self.start, |r| r.0);
            return Err(Error::parse(line, "row labels must be given for every row or none"));
        }
        Ok(Some(self.rows.iter().map(|r| r.2.clone().unwrap_or_default()).collect()))
    }
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == MAGIC {
            sections.push(Section {
                start: line_no,
                kind: String::new(),
                headers: BTreeMap::new(),
                rows: Vec::new(),
            });
            continue;
        }
        let Some(section) = sections.last_mut() else {
            return Err(Error::parse(line_no, format!("document must start with {MAGIC:?}")));
        };
        let first = line.split_whitespace().next().unwrap_or("");
        let is_header = first.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
        if is_header && !line.contains(';') {
            let value = line[first.len()..].trim().to_string();
            if !section.rows.is_empty() {
                return Err(Error::parse(line_no, format!("header {first:?} after rows")));
            }
            if first == "kind" {
                section.kind = value;
            } else if section.headers.insert(first.to_string(), (line_no, value)).is_some() {
                return Err(Error::parse(line_no, format!("duplicate header {first:?}")));
            }
            continue;
        }
        let (cells, label) = match line.split_once(';') {
            Some((cells, label)) => (cells, Some(label.trim().to_string())),
            None => (line, None),
        };
        let cells = cells.split_whitespace().map(str::to_string).collect();
        section.rows.push((line_no, cells, label));
    }
    if sections.is_empty() {
        return Err(Error::parse(1, format!("document must start with {MAGIC:?}")));
    }
    for s in &sections {
        if s.kind.is_empty() {
            return Err(Error::parse(s.start, "missing kind line"));
        }
    }
    Ok(sections)
}

fn caching_from(section: &Section) -> Result<CachingArray> {
    let (k, f) = section.dims()?;
    let z = section.number("Z")?;
    let r = section.number("r")?;
    let mut stars = Vec::with_capacity(k * f);
    for (line, cells, _) in &section.rows {
        for (col, token) in cells.iter().enumerate() {
            stars.push(match token.as_str() {
                "*" => true,
                "." => false,
                other => {
                    return Err(Error::parse(
                        *line,
                        format!("column {}: caching arrays hold only '*' and '.', found {other:?}", col + 1),
                    ))
                }
            });
        }
    }
    let array = CachingArray::new_unchecked(k, f, z, r, stars);
    match section.labels()? {
        Some(labels) => array.with_row_labels(labels),
        None => Ok(array),
    }
}

fn entries(section: &Section, s: u32) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (line, cells, _) in &section.rows {
        for (col, token) in cells.iter().enumerate() {
            out.push(match token.as_str() {
                "*" => Entry::Star,
                "." => {
                    return Err(Error::parse(
                        *line,
                        format!("column {}: delivery arrays admit no null cells", col + 1),
                    ))
                }
                other => {
                    let value: u32 = other.parse().map_err(|_| {
                        Error::parse(*line, format!("column {}: unreadable cell {other:?}", col + 1))
                    })?;
                    if value == 0 || value > s {
                        return Err(Error::parse(
                            *line,
                            format!("column {}: integer {value} outside [1, {s}]", col + 1),
                        ));
                    }
                    Entry::Int(value)
                }
            });
        }
    }
    Ok(out)
}

fn delivery_from(section: &Section, caching: CachingArray) -> Result<DeliveryArray> {
    let (k, f) = section.dims()?;
    if (k, f) != (caching.k(), caching.f()) {
        return Err(Error::parse(
            section.start,
            format!("delivery is {f} x {k} but its caching array is {} x {}", caching.f(), caching.k()),
        ));
    }
    let l = section.number("L")?;
    let s = section.number("S")? as u32;
    let cells = entries(section, s)?;
    DeliveryArray::new_unchecked(Arc::new(caching), l, s, cells)
}

fn epda_from(section: &Section) -> Result<Epda> {
    let (k, f) = section.dims()?;
    let z = section.number("Z")?;
    let l = section.number("L")?;
    let s = section.number("S")? as u32;
    let g = match section.headers.get("g") {
        Some(_) => Some(section.number("g")?),
        None => None,
    };
    let cells = entries(section, s)?;
    Ok(Epda::new_unchecked(k, f, z, l, s, cells).with_declared_regularity(g))
}
