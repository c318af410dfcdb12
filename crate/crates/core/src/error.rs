use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Variants split into *domain* errors (bad input, parameters outside an
/// admissible region) and *numerical* failures (non-convergence, blow-up).
/// [`Error::is_numerical`] tells them apart; the CLI maps them to different
/// exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("(omega = {omega}, c = {c}) is outside the soliton existence region for b = {b}")]
    OutsideExistenceRegion { b: f64, omega: f64, c: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("numerical blow-up at t = {t}: {reason}")]
    NumericalBlowUp { t: f64, reason: String },

    #[error("no positive root: {0}")]
    NoPositiveRoot(String),

    #[error("algebraic decay not shootable")]
    AlgebraicNotShootable,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence(_) | Error::NumericalBlowUp { .. } | Error::NoPositiveRoot(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
