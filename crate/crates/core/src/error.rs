use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension {0} out of range, expected 1, 2 or 3")]
    Dimension(usize),
    #[error("axis {axis}: point count {points} must be even, ≥ 8")]
    PointCount { axis: usize, points: usize },
    #[error("axis {axis}: length {length} must be positive and finite")]
    Length { axis: usize, length: f64 },
    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    Axis { axis: usize, dims: usize },
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("field has zero norm")]
    ZeroNorm,
    #[error("negative density {value} at index {index}")]
    NegativeDensity { index: usize, value: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("center coordinate {value} lies outside the box on axis {axis}")]
    CenterOutside { axis: usize, value: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("non-finite state after step {step}")]
    NumericalAbort { step: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
