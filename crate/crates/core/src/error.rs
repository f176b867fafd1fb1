use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distance distribution function: {0}")]
    InvalidDistFn(String),

    #[error("step location must be non-negative, got {0}")]
    NegativeLocation(f64),

    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),

    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unknown t-norm `{0}` (expected min, prod, luka or maximal)")]
    UnknownTNorm(String),

    #[error("P-2 violated: distinct points {0} and {1} are at distribution eps_0")]
    ZeroDistance(usize, usize),

    #[error("distribution must differ from eps_0 and eps_inf")]
    DegenerateDistribution,

    #[error("triangle inequality violated on ({p}, {q}, {r}): d(p,r)={direct} > d(p,q)+d(q,r)={via}")]
    TriangleViolation {
        p: usize,
        q: usize,
        r: usize,
        direct: f64,
        via: f64,
    },

    #[error("distance table is not a metric: {0}")]
    NotAMetric(String),

    #[error("no alpha on the search grid works; smallest tried {smallest}")]
    AlphaSearchExhausted { smallest: f64 },

    #[error("point index {0} out of range")]
    UnknownPoint(usize),

    #[error("unknown point name `{0}`")]
    UnknownPointName(String),

    #[error("matrix `{name}` defines {rows} rows, horizon {horizon} requested")]
    HorizonExceedsRows {
        name: String,
        rows: usize,
        horizon: usize,
    },

    #[error("ideal `{0}` does not support limit extraction without candidate limits")]
    UnsupportedIdeal(String),

    #[error("witness set has inconclusive density: {0}")]
    InconclusiveWitness(String),

    #[error("space is not metric-induced and the d_L fallback was not requested")]
    NotMetricSpace,

    #[error("horizon {horizon} exceeds available terms {len}")]
    HorizonTooLarge { horizon: usize, len: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
