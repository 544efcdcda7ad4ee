use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sector n={n}, p={p}: need n >= 2 and 1 <= p <= n")]
    InvalidSector { n: u32, p: u32 },

    #[error("invalid cavity coupling g={0}: must be finite and positive")]
    InvalidCoupling(f64),

    #[error("operator does not conserve the sector: {0}")]
    NonConserving(String),

    #[error(
        "operator built for sector ({expected_n}, {expected_p}) applied to ({found_n}, {found_p})"
    )]
    BasisMismatch {
        expected_n: u32,
        expected_p: u32,
        found_n: u32,
        found_p: u32,
    },

    #[error("closed forms exist only for n=4, p=2 (got n={n}, p={p})")]
    ClosedFormUnavailable { n: u32, p: u32 },

    #[error("dark-space dimension changed to {found} (expected {expected}) at step {step} of segment {segment}")]
    DarkDimensionChanged {
        segment: usize,
        step: usize,
        expected: usize,
        found: usize,
    },

    #[error(
        "transport did not converge: estimated error {est_error:e} after {steps} steps per segment"
    )]
    NotConverged { est_error: f64, steps: usize },

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no sign change of the axis z-component in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("evolution failed: {0}")]
    Evolution(String),

    #[error(transparent)]
    Parse(#[from] crate::holonomy::ParseError),
}
