use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the evaluators, bound computations and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile is not differentiable at xi = {xi}")]
    NonDifferentiable { xi: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("representation is degenerate: {condition}")]
    Degenerate { condition: String },

    #[error("representation is not invertible: {condition}")]
    NonInvertible { condition: String },

    #[error("integration failed to converge: worst subinterval [{a}, {b}] with error estimate {error:e}")]
    Integration { a: f64, b: f64, error: f64 },

    #[error("scenario is not resonant: {0}")]
    NotResonant(String),

    #[error("no closed form for this scenario: {0}")]
    UnsupportedClosedForm(String),

    #[error("wavenumber alpha = 0 is excluded from the propagator domain")]
    ExcludedWavenumber,

    #[error("branch {branch} is resonant: characteristic speed vanishes")]
    ResonantMode { branch: usize },
}

impl Error {
    /// True for failures of a numerical procedure rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Integration { .. })
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NonDifferentiable { .. } => "non_differentiable",
            Error::Precondition(_) => "precondition",
            Error::Degenerate { .. } => "degenerate",
            Error::NonInvertible { .. } => "non_invertible",
            Error::Integration { .. } => "integration_failure",
            Error::NotResonant(_) => "not_resonant",
            Error::UnsupportedClosedForm(_) => "unsupported_closed_form",
            Error::ExcludedWavenumber => "excluded_wavenumber",
            Error::ResonantMode { .. } => "resonant_mode",
        }
    }
}
