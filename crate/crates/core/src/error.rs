use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{name} = {value} outside the admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("t = {t} lies outside the function domain [{lo}, {hi}]")]
    OutsideDomain { t: f64, lo: f64, hi: f64 },

    #[error("kernel evaluated at its singularity x = {x}")]
    Singularity { x: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("expected point count {expected:e} exceeds the memory cap {cap:e}")]
    MemoryCap { expected: f64, cap: f64 },

    #[error("truncation cannot reach tolerance {0:e}")]
    Truncation(f64),

    #[error("non-finite value {value} at point ({x}, {y})")]
    NonFinite { x: f64, y: f64, value: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
