use thiserror::Error;

use crate::fields::GridSpec;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("grid mismatch: {left:?} vs {right:?}")]
    GridMismatch { left: GridSpec, right: GridSpec },

    #[error("angle undefined: zero vorticity at grid index {0}")]
    UndefinedAngle(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("CFL violation at t={t}: dt={dt} exceeds limit {limit} (max|u|={umax})")]
    Cfl { t: f64, dt: f64, limit: f64, umax: f64 },

    #[error("blow-up detected at t={t} (step {step}): {detail}")]
    BlowUp { t: f64, step: u64, detail: String },

    #[error("infeasible exponent system: {0}")]
    Infeasible(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
