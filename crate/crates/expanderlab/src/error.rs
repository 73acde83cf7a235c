use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The ODE solution left the graphical regime (|u'| above the cap).
    #[error("slope blow-up at r = {r}: |u'| = {slope} exceeds cap {cap}")]
    SlopeBlowUp { r: f64, slope: f64, cap: f64 },

    #[error("step size underflow at r = {r} (h = {h})")]
    StepUnderflow { r: f64, h: f64 },

    /// No sign change of the shooting map on the scanned bracket.
    /// The scan table (a, slope(a) - tau) is attached for diagnosis.
    #[error("shooting bracket failure: no sign change over {} scanned values of a", scan.len())]
    BracketFailure { scan: Vec<(f64, f64)> },

    /// More than one sign change: contradicts uniqueness, so fail loudly.
    #[error("ambiguous shooting bracket: {} sign changes found", changes)]
    BracketAmbiguous { changes: usize, scan: Vec<(f64, f64)> },

    #[error("root finder did not reach tolerance {tol} (best |g| = {best})")]
    ToleranceNotMet { tol: f64, best: f64 },

    #[error("trace at infinity did not converge: successive estimates differ by {spread} > {tol}")]
    TraceNotConverged { spread: f64, tol: f64 },

    #[error("profile trace {found} does not match cone slope {expected} (tol {tol})")]
    TraceMismatch { found: f64, expected: f64, tol: f64 },

    #[error("time {t} is past extinction time {extinction}")]
    PastExtinction { t: f64, extinction: f64 },

    #[error("CFL step underflow: dt = {dt} at t = {t}")]
    CflUnderflow { dt: f64, t: f64 },

    #[error("quadrature tolerance not met: estimated error {err} > {tol}")]
    QuadratureToleranceNotMet { err: f64, tol: f64 },

    #[error("entropy search radius exceeded {max} without the boundary shell dropping below 1 + eps")]
    SearchRadiusOverflow { max: f64 },

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("graph window escapes the sampled grid (|x0| = {x0}, window reach = {reach}, grid extent = {extent})")]
    WindowEscapesGrid { x0: f64, reach: f64, extent: f64 },

    #[error("non-finite value produced: {0}")]
    NonFinite(String),

    #[error("{stage}: {source}")]
    PipelineStage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn at_stage(self, stage: &str) -> Error {
        Error::PipelineStage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }
}
