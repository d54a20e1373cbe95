use thiserror::Error;

/// Errors raised by solvers, quadrature, bound evaluation and scenario handling.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("step size {h:e} fell below the floor {floor:e} at t = {t}")]
    StepFailure { t: f64, h: f64, floor: f64 },

    #[error("state left the configured box (|x| = {norm:e} > {bound:e}) at t = {t}")]
    DomainEscape { t: f64, norm: f64, bound: f64 },

    #[error("t = {t} lies outside the trajectory span [{lo}, {hi}]")]
    OutOfSpan { t: f64, lo: f64, hi: f64 },

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("Lipschitz constant must be positive, got {0}")]
    NonpositiveM(f64),

    #[error("exponent p = {0} must satisfy 1 < p < inf")]
    InvalidExponent(f64),

    #[error("quadrature did not reach tolerance {tol:e} on [{a}, {b}] (estimate {estimate:e})")]
    QuadratureFailure { a: f64, b: f64, tol: f64, estimate: f64 },

    #[error("flow matrix is numerically singular at t = {t}")]
    SingularFlow { t: f64 },

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
