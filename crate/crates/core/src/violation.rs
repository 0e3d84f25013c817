use std::fmt;

use serde::Serialize;

/// Defining condition of a caching array (B*), delivery array (D*) or
/// EPDA (C*), plus the optional regularity claim of an EPDA.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    B1,
    B2,
    D1,
    D2,
    D3,
    C1,
    C2,
    C3,
    C4,
    Regularity,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Condition::B1 => "B1",
            Condition::B2 => "B2",
            Condition::D1 => "D1",
            Condition::D2 => "D2",
            Condition::D3 => "D3",
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::C3 => "C3",
            Condition::C4 => "C4",
            Condition::Regularity => "regularity",
        };
        f.write_str(name)
    }
}

/// Where a violation sits. Rows and columns are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    Cell { row: usize, column: usize },
    Column { column: usize },
    ColumnPair { first: usize, second: usize },
    Integer { s: u32 },
    IntegerRow { s: u32, row: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Cell { row, column } => write!(f, "cell ({row},{column})"),
            Location::Column { column } => write!(f, "column {column}"),
            Location::ColumnPair { first, second } => write!(f, "columns {first} and {second}"),
            Location::Integer { s } => write!(f, "integer {s}"),
            Location::IntegerRow { s, row } => write!(f, "integer {s}, row {row}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub location: Location,
    pub detail: String,
}

impl Violation {
    pub fn new(condition: Condition, location: Location, detail: impl Into<String>) -> Self {
        Violation {
            condition,
            location,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at {}: {}", self.condition, self.location, self.detail)
    }
}
