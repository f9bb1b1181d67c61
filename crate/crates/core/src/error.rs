use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {what} at t = {t}")]
    Domain { what: &'static str, t: f64 },

    #[error("degree of psi has a pole at t = {t}")]
    Pole { t: f64 },

    #[error("degree of psi is undefined for the zero reaction")]
    Undefined,

    #[error("flux value {g} is outside the range of w -> phi(w^2) w")]
    NonInvertible { g: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("step rejected: flux identity residual {residual:e} exceeds tolerance")]
    StepRejected { residual: f64 },

    #[error("solver failure: {0}")]
    Solver(String),
}
