use thiserror::Error;

/// Errors raised by the inference library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImError {
    #[error("focal set is empty")]
    EmptyFocalSet,
    #[error("masses sum to {sum}, expected 1")]
    MassNotNormalized { sum: f64 },
    #[error("invalid mass {mass} (masses must be finite and positive)")]
    InvalidMass { mass: f64 },
    #[error("subset {bits:#x} is not contained in a frame of {size} atoms")]
    SubsetOutOfFrame { bits: u64, size: usize },
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("degenerate sample: all observations are equal")]
    DegenerateSample,
    #[error("invalid dataset: {0}")]
    InvalidData(String),
    #[error("{what} = {value} is outside the supported range")]
    RangeExceeded { what: &'static str, value: f64 },
    #[error("theta = 0 is not a valid coefficient of variation")]
    ThetaZero,
    #[error("evaluation grid needs at least 2 points, got {0}")]
    DegenerateGrid(usize),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("output error: {0}")]
    Output(String),
}

pub type Result<T, E = ImError> = std::result::Result<T, E>;
