use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`])
/// that the CLI and the C ABI expose verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid Orlicz function: {0}")]
    InvalidOrlicz(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("domain lengths disagree: {0}")]
    AlphaMismatch(String),

    /// The weight is not in the class D_p, so W or W_p diverges.
    #[error("weight is not in D_p: {0}")]
    NotInDp(String),

    /// An improper integral that was requested as a number is infinite.
    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature exceeded its subdivision cap of {cap} on [{lo}, {hi}]")]
    QuadratureCap { cap: usize, lo: f64, hi: f64 },

    #[error("optimizer did not converge after {iterations} line searches (best value {best})")]
    NonConvergence { iterations: usize, best: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("invalid candidate set: {0}")]
    InvalidCandidates(String),

    #[error("malformed JSON: {0}")]
    Parse(String),

    /// Well-formed JSON that does not match the expected schema.
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidStepFunction(_)
            | Error::InvalidWeight(_)
            | Error::InvalidOrlicz(_)
            | Error::InvalidCandidates(_)
            | Error::Schema(_) => "schema_violation",
            Error::Parse(_) => "malformed_json",
            Error::Io(_) => "io_error",
            Error::Domain(_) => "domain_error",
            Error::AlphaMismatch(_) => "alpha_mismatch",
            Error::NotInDp(_) => "dp_violation",
            Error::Divergent(_) => "divergent_integral",
            Error::QuadratureCap { .. } => "quadrature_cap",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Hypothesis(_) => "hypothesis_failed",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
