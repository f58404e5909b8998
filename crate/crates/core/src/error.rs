use thiserror::Error;

/// Errors raised by coefficient construction, field operations and time stepping.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Parodi relation violated: |a2 + a3 - (a6 - a5)| = {residual:e} exceeds {tolerance:e}")]
    ParodiViolation { residual: f64, tolerance: f64 },
    #[error("gamma1 = a3 - a2 = {gamma1} must be positive")]
    NonpositiveGamma1 { gamma1: f64 },
    #[error("viscosity split gamma = {0} must lie in (0, 1)")]
    GammaOutOfRange(f64),
    #[error("Reynolds number {0} must be positive")]
    NonpositiveReynolds(f64),
    #[error("Frank constants must be positive, got ({0}, {1}, {2})")]
    NonpositiveFrank(f64, f64, f64),
    #[error("vector is not unit length: |n| = {0}")]
    NotUnit(f64),
    #[error("matrix is not symmetric and trace free (defect {0:e})")]
    NotSymmetricTraceFree(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("ball radius {radius} exceeds the admissible maximum {max}")]
    RadiusTooLarge { radius: f64, max: f64 },
    #[error("director field violates the unit constraint: max ||n| - 1| = {0:e}")]
    DirectorNotUnit(f64),
    #[error("velocity field is not solenoidal: max |div v| = {0:e}")]
    NotSolenoidal(f64),
    #[error("director field vanishes at grid point {0}")]
    DegenerateDirector(usize),
    #[error("non-finite value produced at t = {t}")]
    NonFinite { t: f64 },
    #[error("unit-length drift {drift:e} before renormalization at t = {t}; time step too large")]
    UnitDrift { drift: f64, t: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("end time {t_end} does not exceed the start time {t0}")]
    InvalidEndTime { t0: f64, t_end: f64 },
    #[error("empty ledger series")]
    EmptySeries,
    #[error("snapshot format error: {0}")]
    Snapshot(String),
    #[error("ledger format error: {0}")]
    LedgerFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
