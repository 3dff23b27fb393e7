use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("SingularResolvent: lambda = {re}+{im}i lies on the spectrum (rcond {rcond:e})")]
    SingularResolvent { re: f64, im: f64, rcond: f64 },

    #[error("Overflow: matrix exponential is not representable ({0})")]
    Overflow(String),

    #[error("SpectrumOutsideSector: eigenvalue {re}+{im}i is not in the closed sector of angle {angle}")]
    SpectrumOutsideSector { re: f64, im: f64, angle: f64 },

    #[error("SpectrumOnContour: eigenvalue {re}+{im}i is within {distance:e} of the integration contour")]
    SpectrumOnContour { re: f64, im: f64, distance: f64 },

    #[error("SpectrumOutsideRegion: eigenvalue {re}+{im}i is not enclosed by the contour")]
    SpectrumOutsideRegion { re: f64, im: f64 },

    #[error("NoDecay: function `{0}` has no decay at infinity and must be regularized first")]
    NoDecay(String),

    #[error("NonConvergence: {what} did not converge (work spent: {work})")]
    NonConvergence { what: String, work: usize },

    #[error("DegenerateRegion: {0}")]
    DegenerateRegion(String),

    #[error("InvalidAngles: {0}")]
    InvalidAngles(String),

    #[error("InvalidRegion: {0}")]
    InvalidRegion(String),

    #[error("InvalidParameters: {0}")]
    InvalidParameters(String),

    #[error("EvaluationFailure: function not finite at {re}+{im}i")]
    EvaluationFailure { re: f64, im: f64 },

    #[error("NotInCommutant: ||UT - TU|| = {defect:e}")]
    NotInCommutant { defect: f64 },

    #[error("LowerBoundViolated: smallest singular value {sigma_min} is below c = {c}")]
    LowerBoundViolated { sigma_min: f64, c: f64 },

    #[error("MaximizerAtBoundary: phi'(x_max) = {derivative} < s = {s}")]
    MaximizerAtBoundary { derivative: f64, s: f64 },

    #[error("HypothesesViolated: {0}")]
    HypothesesViolated(String),

    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
}

impl Error {
    /// True for failures caused by an input that violates a documented
    /// precondition, as opposed to numerical non-convergence.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
