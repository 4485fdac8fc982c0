use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A malformed input row. `line` is 1-based within the source text.
    #[error("{message}, line {line}")]
    Parse { line: usize, message: String },

    #[error("duplicate key ({ticker}, {date}) on lines {first_line} and {second_line}")]
    DuplicateKey {
        ticker: String,
        date: NaiveDate,
        first_line: usize,
        second_line: usize,
    },

    #[error("insufficient overlap: {tickers} tickers over {dates} shared dates (need at least 2 tickers and 3 dates)")]
    InsufficientOverlap { tickers: usize, dates: usize },

    #[error("date {0} is not in the trading calendar")]
    DateNotInCalendar(NaiveDate),

    #[error("baseline {baseline} is after {at}")]
    DateOrder { baseline: NaiveDate, at: NaiveDate },

    #[error("series {0} has zero variance; correlation is undefined")]
    ZeroVariance(String),

    #[error("need at least {needed} return observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("ticker {0} has no sector assignment")]
    MissingSector(String),

    #[error("unknown ticker {0}")]
    UnknownTicker(String),

    #[error("distance {distance} from {center} to {ticker} exceeds the metric bound of 2")]
    MetricViolation {
        center: String,
        ticker: String,
        distance: f64,
    },

    #[error("no color assigned to node {0}")]
    MissingColor(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing input: expected file {}", .0.display())]
    MissingInput(PathBuf),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Wraps an error raised while processing a specific file.
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::InFile {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
