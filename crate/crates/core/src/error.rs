use std::path::PathBuf;

use thiserror::Error;

use crate::recode::RecodingKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite entry at ({row}, {col})")]
    InvalidInput { row: usize, col: usize },

    #[error("{0}")]
    InvalidMatrix(String),

    #[error("weight {index} is not strictly positive ({value})")]
    DegenerateWeight { index: usize, value: f64 },

    #[error("recodings do not match: {0}")]
    MismatchedRecodings(String),

    #[error("recoding of kind {0:?} cannot be analysed with margin-derived weights")]
    UnsupportedKind(RecodingKind),

    #[error("zero row sum for {}", .labels.join(", "))]
    DegenerateRow {
        indices: Vec<usize>,
        labels: Vec<String>,
    },

    #[error("zero column sum for {}", .labels.join(", "))]
    DegenerateColumn {
        indices: Vec<usize>,
        labels: Vec<String>,
    },

    #[error("requested {requested} dimensions but the numerical rank is {actual_rank}")]
    RankExceeded { requested: usize, actual_rank: usize },

    #[error("all singular values are zero")]
    DegenerateSolution,

    #[error("rating {value} at row {row}, column {col} is outside 1..={q}")]
    RatingOutOfRange {
        row: usize,
        col: usize,
        value: i64,
        q: u32,
    },

    #[error("malformed csv at line {line}: {reason}")]
    MalformedCsv { line: u64, reason: String },

    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),

    #[error("operation requires a {expected} result")]
    WrongVariant { expected: &'static str },

    #[error("a two-dimensional solution is required")]
    NeedTwoDimensions,

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable variant name, used by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput { .. } => "InvalidInput",
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::DegenerateWeight { .. } => "DegenerateWeight",
            Error::MismatchedRecodings(_) => "MismatchedRecodings",
            Error::UnsupportedKind(_) => "UnsupportedKind",
            Error::DegenerateRow { .. } => "DegenerateRow",
            Error::DegenerateColumn { .. } => "DegenerateColumn",
            Error::RankExceeded { .. } => "RankExceeded",
            Error::DegenerateSolution => "DegenerateSolution",
            Error::RatingOutOfRange { .. } => "RatingOutOfRange",
            Error::MalformedCsv { .. } => "MalformedCsv",
            Error::UnknownDataset(_) => "UnknownDataset",
            Error::WrongVariant { .. } => "WrongVariant",
            Error::NeedTwoDimensions => "NeedTwoDimensions",
            Error::Io { .. } => "IoError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
