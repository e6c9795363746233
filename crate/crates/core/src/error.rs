use thiserror::Error;

use crate::series::CharacteristicPoint;

/// Errors produced anywhere in the estimation pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An exact-integer computation left the representable range.
    #[error("arithmetic range exceeded: {0}")]
    ArithmeticRange(String),

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("series too short: need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("series is already cumulative")]
    AlreadyCumulative,

    /// No characteristic point could be located. The global maximum of the
    /// difference sequence, when one exists, is carried as a suggestion.
    #[error("no strict local maximum found{}", fallback_hint(.fallback))]
    NotFound {
        fallback: Option<Box<CharacteristicPoint>>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A bracket that must contain a sign change did not.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

fn fallback_hint(fallback: &Option<Box<CharacteristicPoint>>) -> String {
    match fallback {
        Some(p) => format!(
            " (global maximum at index {} [{}], value {})",
            p.index, p.label, p.series_value
        ),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
