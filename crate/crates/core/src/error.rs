use thiserror::Error;

/// Errors raised by curve construction, the optimizers, the test-function
/// generator and the benchmark harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("curve needs {needed} index bits but only {available} are supported")]
    IndexOverflow { needed: u32, available: u32 },
    #[error("curve argument {0} lies outside [0, 1]")]
    OutOfUnitInterval(f64),
    #[error("cell index {index} out of range (curve has {cells} cells)")]
    CellOutOfRange { index: u64, cells: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty diagram")]
    EmptyDiagram,
    #[error("diagram point {id} has non-positive h = {h}")]
    NonPositiveH { id: u64, h: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("objective returned a non-finite value {value} at {point:?}")]
    NonFiniteObjective { value: f64, point: Vec<f64> },
    #[error("objective failed: {0}")]
    Objective(String),
    #[error("point {0:?} lies outside the function domain")]
    OutsideDomain(Vec<f64>),
    #[error("infeasible test-function spec after {attempts} attempts: {reason}")]
    InfeasibleSpec { attempts: usize, reason: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
