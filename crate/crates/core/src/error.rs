use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {dim} = {value} lies outside [{lower}, {upper}]")]
    OutOfDomain {
        dim: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("column {0} of the measurement matrix is zero")]
    ZeroColumn(usize),

    #[error("greedy pool exhausted: requested {requested} points from a pool of {pool}")]
    PoolExhausted { requested: usize, pool: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("QOI {0} has zero range on the test set")]
    DegenerateQoi(usize),

    #[error("solver failed on QOI {qoi}: {source}")]
    Solver {
        qoi: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("baseline scheme `{0}` missing from records")]
    MissingBaseline(String),

    #[error("unknown test problem `{0}`")]
    UnknownProblem(String),

    #[error("unknown sampling scheme `{0}`")]
    UnknownScheme(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
