use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quantile curve: {0}")]
    InvalidCurve(String),

    #[error("invalid interval: lower {lower} > upper {upper}")]
    CrossedInterval { lower: f64, upper: f64 },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("alpha {0} does not put both interval bounds on the probability grid")]
    OffGridInterval(f64),

    #[error("empty pool")]
    EmptyPool,

    #[error("degenerate trim: beta {beta} keeps no forecasts on either side of a pool of {pool_size}")]
    DegenerateTrim { beta: f64, pool_size: usize },

    #[error("trim fraction must lie in (0, 1), got {0}")]
    InvalidBeta(f64),

    #[error("length mismatch: {0} forecasts vs {1} observations")]
    LengthMismatch(usize, usize),

    #[error("empty input")]
    EmptyInput,

    #[error("no observation for location {location} in week {week}")]
    MissingTruth { location: String, week: i64 },

    #[error("conflicting truth values for location {location} in week {week}: {first} vs {second}")]
    ConflictingTruth {
        location: String,
        week: i64,
        first: u64,
        second: u64,
    },

    #[error("every series was excluded from the skill score (zero scores)")]
    NoSkillSeries,

    #[error("no slot could be scored")]
    NothingScored,

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag for the error family.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidCurve(_) => "invalid_curve",
            Error::CrossedInterval { .. } => "crossed_interval",
            Error::InvalidValue(_) => "invalid_value",
            Error::OffGridInterval(_) => "off_grid_interval",
            Error::EmptyPool => "empty_pool",
            Error::DegenerateTrim { .. } => "degenerate_trim",
            Error::InvalidBeta(_) => "invalid_beta",
            Error::LengthMismatch(..) => "length_mismatch",
            Error::EmptyInput => "empty_input",
            Error::MissingTruth { .. } => "missing_truth",
            Error::ConflictingTruth { .. } => "conflicting_truth",
            Error::NoSkillSeries => "no_skill_series",
            Error::NothingScored => "nothing_scored",
            Error::UnknownMethod(_) => "unknown_method",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
