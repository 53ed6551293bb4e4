use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series contains missing values")]
    MissingData,
    #[error("series too short: need at least {needed} observations, got {got}")]
    InsufficientLength { needed: usize, got: usize },
    #[error("expected {expected} head values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("all non-missing values are equal; min-max range is degenerate")]
    DegenerateRange,
    #[error("no observed value within the window around index {index}")]
    UnfillableGap { index: usize },
    #[error("period {period} out of range for series of length {len}")]
    PeriodOutOfRange { period: usize, len: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("coefficients violate stationarity or invertibility")]
    NonStationaryParams,
    #[error("all grid candidates failed")]
    AllCandidatesFailed,
    #[error("worker failure: {0}")]
    WorkerFailure(String),
    #[error("cannot split {len} observations into {segments} segments of at least {min} points")]
    TooManySegments { len: usize, segments: usize, min: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("differences have zero variance")]
    ZeroVariance,
    #[error("residuals are all zero")]
    DegenerateResiduals,
    #[error("sample size {0} outside the supported range 3..=5000")]
    SampleSizeOutOfRange(usize),
    #[error("regressor matrix is rank deficient")]
    RankDeficient,
    #[error("too few observations ({n}) for {k} regressors")]
    TooFewObservations { n: usize, k: usize },
    #[error("times must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("{requested} workers requested but only {available} cores available")]
    Oversubscribed { requested: usize, available: usize },
}

/// Coarse grouping used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidArgument(_) | ArityMismatch { .. } | Oversubscribed { .. } | TooManySegments { .. } => {
                ErrorClass::Usage
            }
            MissingData
            | InsufficientLength { .. }
            | DegenerateRange
            | UnfillableGap { .. }
            | PeriodOutOfRange { .. }
            | LengthMismatch(..)
            | EmptyInput
            | SampleSizeOutOfRange(_)
            | TooFewObservations { .. } => ErrorClass::Data,
            NonStationaryParams
            | AllCandidatesFailed
            | WorkerFailure(_)
            | ZeroVariance
            | DegenerateResiduals
            | RankDeficient
            | NonPositiveTime(_) => ErrorClass::Numerical,
        }
    }
}
