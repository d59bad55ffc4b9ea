use thiserror::Error;

/// Failures raised anywhere in the library.
///
/// The variants split into two families: bad inputs (`Domain`,
/// `MissingParam`, `InsideHorizon`, `InvalidParam`, `DivergentOrder`) and
/// numerical solver failures (`Convergence`, `NoSignChange`, `NoCrossing`,
/// `Cutoff`). The CLI maps them onto distinct exit codes via
/// [`Error::is_solver_failure`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {evals} evaluations (error estimate {estimate:e}, target {target:e})")]
    Convergence { evals: usize, estimate: f64, target: f64 },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{what} never crosses its threshold before t = {limit:e}")]
    NoCrossing { what: String, limit: f64 },

    #[error("Fock cutoff {cutoff} too small: boundary population {population:e} exceeds {limit:e}")]
    Cutoff { cutoff: usize, population: f64, limit: f64 },

    #[error("missing parameter: {0}")]
    MissingParam(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("radius {r} m is inside the Schwarzschild radius {r_s} m")]
    InsideHorizon { r: f64, r_s: f64 },

    #[error("characteristic function is not integrable at order s = {s} (damping {damping})")]
    DivergentOrder { s: f64, damping: f64 },
}

impl Error {
    /// True for numerical failures, false for rejected inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::NoSignChange { .. } | Error::NoCrossing { .. } | Error::Cutoff { .. }
        )
    }

    /// Short machine-readable tag, used in CSV status columns.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Convergence { .. } => "convergence",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::NoCrossing { .. } => "no_crossing",
            Error::Cutoff { .. } => "cutoff",
            Error::MissingParam(_) => "missing_param",
            Error::InvalidParam(_) => "invalid_param",
            Error::InsideHorizon { .. } => "inside_horizon",
            Error::DivergentOrder { .. } => "divergent_order",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
