use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a formula, e.g. a non-positive distance.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration field failed validation.
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    /// An allocation violates a structural rule (orthogonality, index range, lengths).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("search space of {size} allocations exceeds the cap of {cap} (N={n_rbs}, C={n_cues}, D={n_pairs}, L={n_relays})")]
    SearchSpaceTooLarge {
        size: u128,
        cap: u128,
        n_rbs: usize,
        n_cues: usize,
        n_pairs: usize,
        n_relays: usize,
    },

    #[error("cannot summarize an empty set of reports")]
    EmptyInput,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("config parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
