use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("non-positive value {value} at year {year}; series must be log-transformable")]
    NonPositiveValue { year: f64, value: f64 },

    #[error("malformed series: {0}")]
    MalformedSeries(String),

    #[error("singular denominator: |{denominator}| is below the floor {floor}")]
    SingularDenominator { denominator: f64, floor: f64 },

    #[error("series have no overlapping years")]
    NoOverlap,

    #[error("grid of {cells} cells exceeds the budget of {budget}")]
    ResourceLimit { cells: u64, budget: u64 },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("line {line}: malformed period {start}-{end}; start year must precede end year")]
    MalformedPeriod { line: u64, start: i32, end: i32 },

    #[error("unmatched rows: {}", .0.join(", "))]
    NameMismatch(Vec<String>),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
