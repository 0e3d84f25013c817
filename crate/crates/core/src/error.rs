use crate::violation::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Parameters outside the domain a construction is defined on.
    #[error("construction domain: {0}")]
    Domain(String),

    #[error("gcd(K,t,L) = 1, nothing to reduce; build the unreduced arrays instead")]
    NoReduction,

    #[error("{}", format_violations(.0))]
    Violations(Vec<Violation>),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("search cap exceeded: {0}")]
    CapExceeded(String),

    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("formula not applicable: {0}")]
    NotApplicable(String),
}

fn format_violations(violations: &[Violation]) -> String {
    match violations {
        [] => "no violations".to_string(),
        [only] => only.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more)", rest.len()),
    }
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
