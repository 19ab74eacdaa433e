use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("{routine} did not converge after {sweeps} sweeps")]
    NoConvergence { routine: &'static str, sweeps: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("zero vector has no Schmidt decomposition")]
    ZeroVector,

    #[error("target vector must have unit norm, got {norm}")]
    NotUnitVector { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dense model needs {required} amplitudes but the cap is {cap}")]
    DenseCapExceeded { required: u128, cap: usize },

    #[error("matrix is not supported on the first column (largest other entry {max_off:.3e})")]
    PatternMismatch { max_off: f64 },

    #[error("maximally entangled targets have a unique embezzlement correlation; no alternate exists")]
    MaximallyEntangled,

    #[error("invalid box: {0}")]
    InvalidBox(String),
}
