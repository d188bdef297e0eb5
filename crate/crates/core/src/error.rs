use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric input violates its domain (non-positive constant, NaN, mu <= 1, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A structural constraint of the rectangular model is violated.
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    /// Root bracketing / bisection could not produce a usable answer.
    #[error("solver failure: {0}")]
    SolverFailure(String),
    /// The requested design point admits no transparency root.
    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),
    /// A resonance verification sweep found no usable peak.
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    /// The scattering denominator vanished (cannot happen for real potentials).
    #[error("singular scattering: {0}")]
    SingularScattering(String),
}

pub type Result<T> = std::result::Result<T, Error>;
