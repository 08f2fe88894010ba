use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("slit count must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("diagonal entry {index} is {re}{im:+}i, expected 1")]
    DiagonalNotUnit { index: usize, re: f64, im: f64 },
    #[error("matrix is not Hermitian at ({0}, {1})")]
    NotHermitian(usize, usize),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),
    #[error("coherence modulus |gamma_{0}{1}| exceeds 1")]
    ModulusExceedsOne(usize, usize),
    #[error("mode vector {0} has zero norm")]
    ZeroNormRow(usize),
    #[error("polarization vector {0} is not unit norm")]
    NotUnitPolarization(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for {n} slits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("intensity {index} is negative or not finite: {value}")]
    InvalidIntensity { index: usize, value: f64 },
    #[error("total intensity is zero")]
    ZeroTotalIntensity,
    #[error("invalid geometry: {0}")]
    InvalidGeometry(&'static str),
    #[error("search window contains fewer than three samples")]
    EmptyWindow,
    #[error("grid is undersampled: {per_fringe:.1} samples per fringe width, need at least {required}")]
    UndersampledGrid { per_fringe: f64, required: usize },
    #[error("incoherent reference intensity is zero at the primary maximum")]
    ZeroIncoherentIntensity,
    #[error("invalid Michelson extrema: i_max = {i_max}, i_min = {i_min}")]
    InvalidExtrema { i_max: f64, i_min: f64 },
    #[error("ensemble needs at least {required} realizations, got {found}")]
    TooFewRealizations { required: usize, found: usize },
    #[error("mutual-intensity matrix has eigenvalue {0:e} below the numerical floor")]
    NegativeEigenvalue(f64),
    #[error("malformed pattern data: {0}")]
    MalformedPattern(String),
    #[error(transparent)]
    Json(#[from] JsonError),
}

/// Wrapper so that [`Error`] stays `Clone + PartialEq`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct JsonError(pub String);

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(JsonError(e.to_string()))
    }
}
