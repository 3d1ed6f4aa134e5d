use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square with n >= 1, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("rank deficiency: pivot {index} has magnitude {magnitude:e}")]
    RankDeficient { index: usize, magnitude: f64 },

    #[error("singular linear system at pivot {index}")]
    Singular { index: usize },

    #[error("eigenvalue iteration did not converge after {iterations} iterations ({unconverged} eigenvalues left)")]
    EigenNoConvergence {
        iterations: usize,
        unconverged: usize,
    },

    #[error("root finder did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    RootsNoConvergence {
        iterations: usize,
        worst_residual: f64,
    },

    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {point} lies outside the open unit disk")]
    OutsideDisk { point: String },

    #[error("evaluation too close to the singularity |1 - z_i conj(z_j)| = {distance:e}")]
    NearSingularity { distance: f64 },

    #[error("batch aborted at sample {sample} ({completed} of {requested} completed): {source}")]
    BatchAborted {
        sample: usize,
        completed: usize,
        requested: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("mismatched grids: {0}")]
    GridMismatch(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
