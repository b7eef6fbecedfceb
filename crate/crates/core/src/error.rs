use num_complex::Complex64;
use thiserror::Error;

use crate::grid::TimeGrid;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: TimeGrid, right: TimeGrid },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("slot {slot} is outside 1..={slots}")]
    SlotOutOfRange { slot: usize, slots: usize },

    #[error("contraction order {r} exceeds min({p}, {q})")]
    ContractionOrder { r: usize, p: usize, q: usize },

    #[error("inverse number operator needs m(F) = 0, got {0}")]
    NotCentred(Complex64),

    #[error("process is not adapted: slot {slot} component depends on slot {dependency}")]
    NotAdapted { slot: usize, dependency: usize },

    #[error(
        "{slots} slots exceeds the oracle cap of {cap} (dense matrices need {bytes} bytes each; \
         raise CLIFFORD_MAX_DIM to override)"
    )]
    DimensionCap { slots: usize, cap: usize, bytes: u128 },

    #[error("operand is not self-adjoint (residual {0:e})")]
    NotSelfAdjoint(f64),

    #[error("Lambert W is undefined on the principal branch for {0}")]
    LambertDomain(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
