use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius {r} outside the metric domain [{start}, inf)")]
    DomainViolation { r: f64, start: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("tail integral diverges: {0}")]
    DivergentIntegral(String),

    #[error("quadrature did not converge (estimated error {error:e})")]
    QuadratureFailure { error: f64 },

    #[error("profile is not harmonically flat (|laplacian| = {residual:e} at r = {r})")]
    NotHarmonicallyFlat { r: f64, residual: f64 },

    #[error("asymptotic fit residual {residual:e} exceeds tolerance {tolerance:e}")]
    FitResidual { residual: f64, tolerance: f64 },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverNonConvergence { iterations: usize, residual: f64 },

    #[error("flux spread {spread:e} across extraction radii exceeds {tolerance:e}")]
    FluxSpread { spread: f64, tolerance: f64 },

    #[error("asymptotic coefficient {fit} disagrees with flux capacity {flux} (relative {relative:e})")]
    AsymptoticMismatch { fit: f64, flux: f64, relative: f64 },

    #[error("threshold {t} is near a critical value (min gradient {min_gradient:e})")]
    NearCriticalLevel { t: f64, min_gradient: f64 },

    #[error("level set at {t} is not a simple pole-to-pole meridian curve")]
    BadContour { t: f64 },

    #[error("signed volume is not monotone in the threshold (violation {violation:e})")]
    NonMonotoneVolume { violation: f64 },

    #[error("metric is not embeddable as a surface of revolution (max |rho'| = {max_slope})")]
    NotEmbeddable { max_slope: f64 },

    #[error("degenerate embedding: {0}")]
    DegenerateEmbedding(String),

    #[error("Lambda unavailable: Gauss curvature is not positive (min K = {min_gauss:e})")]
    LambdaUnavailable { min_gauss: f64 },

    #[error("no horizon found in the metric domain")]
    NoHorizon,

    #[error("no applicable hypothesis set: {0}")]
    NoApplicableHypothesis(String),

    #[error("mixed normal conventions: expected {expected}, got {found}")]
    MixedConvention { expected: String, found: String },

    #[error("volume {volume} below the attainable range (infimum {infimum})")]
    VolumeOutOfRange { volume: f64, infimum: f64 },

    #[error("the solution carries no potential of the requested kind: {0}")]
    Unsolved(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
