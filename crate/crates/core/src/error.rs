use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid size {0}: need an even number of points, at least 8")]
    InvalidGrid(usize),

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid mismatch: {left} points vs {right} points")]
    GridMismatch { left: usize, right: usize },

    /// A kernel mode of the operand is non-zero, so the input is not in the
    /// image of the (degenerate) multiplier.
    #[error("kernel obstruction: mode {mode} has magnitude {magnitude:e} (tolerance {tolerance:e})")]
    KernelObstruction {
        mode: i64,
        magnitude: f64,
        tolerance: f64,
    },

    #[error("map is not orientation preserving: minimum derivative {min_derivative}")]
    NonMonotone { min_derivative: f64 },

    #[error("Newton inversion did not converge at x = {x}")]
    InversionFailed { x: f64 },

    #[error("{0} is already in canonical form")]
    NotReducible(String),

    #[error("need at least {needed} time samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("sample index {index} is not an interior sample of a flow with {len} samples")]
    NotInterior { index: usize, len: usize },

    #[error("unknown equation `{0}`")]
    UnknownEquation(String),

    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
