use thiserror::Error;

/// Which end of the radial interval an admissibility problem refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Origin,
    Boundary,
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::Origin => write!(f, "r=0"),
            Endpoint::Boundary => write!(f, "r=R"),
        }
    }
}

/// Local integrability failure: the integrand behaves like `t^exponent`
/// near `endpoint` with `exponent <= -1`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DivergenceReason {
    pub endpoint: Endpoint,
    pub exponent: f64,
}

impl std::fmt::Display for DivergenceReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "integrand ~ t^{} near {} is not integrable",
            self.exponent, self.endpoint
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dilation weight list is empty")]
    EmptyWeights,
    #[error("dilation weight {0} is below 1")]
    WeightBelowOne(f64),
    #[error("dilation parameter must be positive, got {0}")]
    NonpositiveLambda(f64),
    #[error("point has dimension {got}, model has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("incompatible quasi-norm: {0}")]
    IncompatibleNormKind(String),
    #[error("moment r^{s} diverges at the origin for Q={q}")]
    DivergentMoment { s: f64, q: f64 },
    #[error("Monte Carlo needs at least 10^4 samples, got {0}")]
    TooFewSamples(usize),

    #[error("evaluation point r={r} lies outside (0, {radius})")]
    EvalOutsideDomain { r: f64, radius: f64 },
    #[error("pole hit at r={0}")]
    PoleHit(f64),
    #[error("cutoff width must satisfy 0 < delta < 1/2, got {0}")]
    BadDelta(f64),
    #[error("expression syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("integrand returned a non-finite value at x={0}")]
    NonFiniteSample(f64),
    #[error("invalid integration interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    #[error("I_p is undefined at (0,0) for p < 2")]
    UndefinedAtOrigin,

    #[error("inadmissible: {0}")]
    Inadmissible(DivergenceReason),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("no admissible delta: {0}")]
    NoAdmissibleDelta(String),
    #[error("delta window violated: {0}")]
    WindowViolation(String),
    #[error("Rayleigh quotient denominator vanishes")]
    ZeroDenominator,
}

pub type Result<T> = std::result::Result<T, Error>;
